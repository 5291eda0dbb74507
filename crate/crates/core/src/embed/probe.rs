//! The continuity probe `F(t) = ⟨β_{t,1-t} h, ξ β_{1-t,t} h⟩` on `[0, 1]`,
//! where `ξ` exchanges tensor factors, plus the two-unit word probe.
//!
//! An embedding into an Arveson system forces `F` to be continuous with
//! `F(0) = F(1) = ‖h‖²`; a jump at the endpoints is an obstruction.

use serde::Serialize;

use crate::embed::segment::Point;
use crate::error::{Error, Result};
use crate::num::{exchange, CVec2, Time};
use crate::rational::{y_norm_law_f64, EtaFamily};
use crate::system::{factorial, FiniteGridSystem, MAX_FACTORIAL_LEVEL};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbePoint {
    /// Grid index `k`, time `k / denominator`.
    pub k: u64,
    pub value: C64,
}

/// Largest jump between neighbouring points of the sub-grid with step `1/step_den`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Modulus {
    pub step_den: u64,
    pub omega: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeTable {
    pub denominator: u64,
    pub points: Vec<ProbePoint>,
    /// `‖h‖²`, the value at `t ∈ {0, 1}`.
    pub endpoint_value: f64,
    /// One entry per factorial `n! ≥ 2` dividing the denominator.
    pub omega: Vec<Modulus>,
}

impl ProbeTable {
    fn new(denominator: u64, points: Vec<ProbePoint>, endpoint_value: f64) -> Self {
        let omega = factorial_moduli(denominator, &points);
        ProbeTable { denominator, points, endpoint_value, omega }
    }

    pub fn value_at(&self, k: u64) -> Option<C64> {
        self.points.iter().find(|p| p.k == k).map(|p| p.value)
    }

    /// Interior points `0 < k < denominator`.
    pub fn interior(&self) -> impl Iterator<Item = &ProbePoint> {
        self.points.iter().filter(move |p| p.k > 0 && p.k < self.denominator)
    }

    /// `max |F(t)| - ‖h‖²`; nonpositive when Cauchy–Schwarz holds.
    pub fn cauchy_schwarz_excess(&self) -> f64 {
        self.points.iter().map(|p| p.value.norm() - self.endpoint_value).fold(f64::NEG_INFINITY, f64::max)
    }
}

fn factorial_moduli(den: u64, points: &[ProbePoint]) -> Vec<Modulus> {
    let mut out = Vec::new();
    // level 1 only compares the two endpoints, which agree by definition
    for n in 2..=MAX_FACTORIAL_LEVEL {
        let f = factorial(n);
        if f > den {
            break;
        }
        if !den.is_multiple_of(f) {
            continue;
        }
        let stride = den / f;
        let mut omega: f64 = 0.0;
        for p in points.iter().filter(|p| p.k % stride == 0) {
            if let Some(q) = points.iter().find(|q| q.k == p.k + stride) {
                omega = omega.max((q.value - p.value).norm());
            }
        }
        out.push(Modulus { step_den: f, omega });
    }
    out
}

/// Evaluate `F` at every grid point of `[0, 1]` from the stored maps.
pub fn liebscher_probe(sys: &FiniteGridSystem, h: &CVec2) -> Result<ProbeTable> {
    let n = Time::int(1)?
        .index_on(sys.step())
        .filter(|&n| n <= sys.horizon())
        .ok_or_else(|| Error::OffGrid(format!("grid with step {} up to {} does not reach 1", sys.step(), sys.horizon())))?;
    let norm = h.norm_sqr();
    if !(norm > 0.0) || !h.is_finite() {
        return Err(Error::InvalidSpec("probe vector must be nonzero and finite".into()));
    }
    let mut points = vec![ProbePoint { k: 0, value: C64::new(norm, 0.0) }];
    for j in 1..n {
        let left = sys.beta(j, n - j).apply(h);
        let right = exchange(&sys.beta(n - j, j).apply(h));
        points.push(ProbePoint { k: j, value: left.inner(&right) });
    }
    points.push(ProbePoint { k: n, value: C64::new(norm, 0.0) });
    Ok(ProbeTable::new(n, points, norm))
}

/// `η_t (c^t ‖y_{1-t}‖² + c^{1-t} conj(η_1) ‖y_t‖²)` for `h = y₁`.
pub fn probe_closed_form_type3(c: f64, eta: &EtaFamily, t: Time) -> Result<C64> {
    let den = eta.denominator;
    let k = t
        .index_on(Time::new(1, den)?)
        .filter(|&k| k <= den && den as usize <= eta.values.len())
        .ok_or_else(|| Error::OffGrid(format!("{t} is not in [0, 1] on the character grid 1/{den}")))?;
    let tf = t.as_f64();
    let bracket = c.powf(tf) * y_norm_law_f64(c, 1.0 - tf) + c.powf(1.0 - tf) * y_norm_law_f64(c, tf) * eta.at(den).conj();
    Ok(eta.at(k) * bracket)
}

/// Two units `u` (written `X`) and `v` (written `Y`) with `⟨u_t, v_t⟩ = a^t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum UnitSymbol {
    X,
    Y,
}

/// A product of unit pieces over a tiling of the circle `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnitWord(pub Vec<(Point, Point, UnitSymbol)>);

impl UnitWord {
    /// Rotate by `shift` modulo 1.
    pub fn rotate(&self, shift: Point) -> UnitWord {
        let one = Point::from_integer(1);
        let shift = shift - Point::from_integer(shift.to_integer());
        let mut out = Vec::new();
        for &(lo, hi, s) in &self.0 {
            let (a, b) = (lo + shift, hi + shift);
            if b <= one {
                out.push((a, b, s));
            } else if a >= one {
                out.push((a - one, b - one, s));
            } else {
                out.push((a, one, s));
                out.push((Point::from_integer(0), b - one, s));
            }
        }
        out.sort_by_key(|p| p.0);
        UnitWord(out)
    }

    /// `Π` over overlaps of the unit kernel: `1` for equal symbols, `a^{len}` otherwise.
    pub fn kernel(&self, other: &UnitWord, a: f64) -> f64 {
        let mut value = 1.0;
        for &(lo, hi, s) in &self.0 {
            for &(lo2, hi2, s2) in &other.0 {
                let (l, h) = (lo.max(lo2), hi.min(hi2));
                if l < h && s != s2 {
                    let len = *(h - l).numer() as f64 / *(h - l).denom() as f64;
                    value *= if a == 0.0 { 0.0 } else { (len * a.ln()).exp() };
                }
            }
        }
        value
    }
}

/// Probe of `h̃` with `β̃_{1/2,1/2} h̃ = x_{1/2} ⊗ y_{1/2}` on `[0, 1/2]`,
/// evaluated through the word kernel.
pub fn extended_probe_type1(a: f64, den: u64) -> Result<ProbeTable> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::InvalidSpec(format!("a = {a} is outside [0, 1)")));
    }
    if den < 2 || !den.is_multiple_of(2) {
        return Err(Error::OffGrid(format!("1/2 is not on the grid 1/{den}")));
    }
    let half = Point::new(1, 2);
    let word = UnitWord(vec![
        (Point::from_integer(0), half, UnitSymbol::X),
        (half, Point::from_integer(1), UnitSymbol::Y),
    ]);
    let endpoint = word.kernel(&word, a);
    let points = (0..=den / 2)
        .map(|k| ProbePoint { k, value: C64::new(word.rotate(Point::new(k, den)).kernel(&word, a), 0.0) })
        .collect();
    Ok(ProbeTable::new(den, points, endpoint))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{generate_canonical, SystemSpec};

    #[test]
    fn e1_probe_of_y_is_one() {
        let (sys, basis) = generate_canonical(&SystemSpec::E1 { a: 0.3 }, 6, 6).unwrap();
        let p = liebscher_probe(&sys, basis.y(6)).unwrap();
        assert!(p.points.iter().all(|q| (q.value - 1.0).norm() < 1e-12));
    }

    #[test]
    fn e4_probe_jumps() {
        let (sys, basis) = generate_canonical(&SystemSpec::E4, 6, 6).unwrap();
        let p = liebscher_probe(&sys, basis.y(6)).unwrap();
        assert!(p.interior().all(|q| q.value.norm() < 1e-15));
        assert_eq!(p.value_at(0), Some(C64::new(1.0, 0.0)));
        assert_eq!(p.omega.len(), 2);
        assert!(p.omega.iter().all(|m| (m.omega - 1.0).abs() < 1e-15));
    }

    #[test]
    fn closed_form_examples() {
        let spec = SystemSpec::e3_rational(1.0, std::f64::consts::PI, vec![]);
        let eta = EtaFamily::from_spec(&spec, 2, 2).unwrap();
        let v = probe_closed_form_type3(1.0, &eta, Time::new(1, 2).unwrap()).unwrap();
        assert!(v.norm() < 1e-15);
        let flat = EtaFamily::from_spec(&SystemSpec::e3_rational(1.0, 0.0, vec![]), 4, 4).unwrap();
        for k in 1..=4 {
            let v = probe_closed_form_type3(1.0, &flat, Time::new(k, 4).unwrap()).unwrap();
            assert!((v - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn word_kernel_examples() {
        let p = extended_probe_type1(0.5, 4).unwrap();
        assert!((p.value_at(1).unwrap().re - 0.5f64.sqrt()).abs() < 1e-15);
        let p = extended_probe_type1(0.0, 6).unwrap();
        assert_eq!(p.endpoint_value, 1.0);
        assert!(p.interior().all(|q| q.value == C64::new(0.0, 0.0)));
        assert!(extended_probe_type1(0.5, 5).is_err());
    }

    #[test]
    fn rotation_wraps() {
        let w = UnitWord(vec![(Point::from_integer(0), Point::new(1, 2), UnitSymbol::X), (Point::new(1, 2), Point::from_integer(1), UnitSymbol::Y)]);
        let r = w.rotate(Point::new(3, 4));
        assert_eq!(r.0.len(), 3);
        assert_eq!(w.rotate(Point::from_integer(1)), w);
    }
}
