//! Concrete embeddings into Fock space.
//!
//! Type `E1(a)`, `a > 0`: `x_t ↦ e(0)` and `y_t ↦ e^{-κt/2} e(g)` with `g ≡ √κ`
//! and `κ = 2 ln(1/a)`, so `⟨α(x_t), α(y_t)⟩ = a^t`.
//!
//! Type `E3(c, b)`: `x_t ↦ 1 ⊕ 0` and `y_t ↦ 0 ⊕ f_t` with
//! `f_t(s) = A c^s e^{ibs}` on `(0, t)`, `A² = 2 ln c / (c² - 1)` (`A = 1` at
//! `c = 1`), so `‖f_t‖² = ‖y_t‖²`.

use serde::Serialize;

use crate::embed::fock::{ExpVectorCombo, FockElement, FockVector01, ProductElement};
use crate::embed::segment::{point, ExpSegment, ExpTerm};
use crate::embed::verdict::{decide_embeddable, Construction, Verdict};
use crate::error::{Error, Result};
use crate::num::{CVec2, Mat2, Time};
use crate::rational::rational_form;
use crate::system::{generate_canonical, CanonicalBasis, FiniteGridSystem, SystemSpec};
use crate::C64;

/// `√(2 ln c / (c² − 1))`, continuous through `c = 1`.
pub fn fock_amplitude(c: f64) -> f64 {
    if (c - 1.0).abs() <= 1e-12 {
        return 1.0;
    }
    let num = 2.0 * (c - 1.0).ln_1p();
    let den = (c - 1.0) * (c + 1.0);
    (num / den).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Representation {
    pub construction: Construction,
    /// Canonical system the family acts on, in rational time.
    pub system: FiniteGridSystem,
    pub basis: CanonicalBasis,
}

/// Build `α_t` for every grid time `k/den`, `k ≤ horizon`.
pub fn build_representation(spec: &SystemSpec, den: u64, horizon: u64) -> Result<Representation> {
    let spec = rational_form(spec, &[])?;
    let construction = match decide_embeddable(&spec, None)? {
        Verdict::Embeddable { construction } => construction,
        Verdict::NotEmbeddable { reason } => return Err(Error::NotEmbeddable(format!("{reason:?}"))),
    };
    let (system, basis) = generate_canonical(&spec, den, horizon)?;
    Ok(Representation { construction, system, basis })
}

impl Representation {
    pub fn with_construction(&self, construction: Construction) -> Self {
        Representation { construction, ..self.clone() }
    }

    fn time(&self, j: u64) -> Result<Time> {
        self.basis.step.scale(j)
    }

    /// `α_{jδ}(x)` and `α_{jδ}(y)` for the canonical basis at grid index `j`.
    fn images(&self, j: u64) -> Result<(FockElement, FockElement)> {
        let t = self.time(j)?;
        let len = point(t);
        let one = C64::new(1.0, 0.0);
        Ok(match self.construction {
            Construction::FockOneParticle { c, b, amplitude } => (
                FockElement::Sector01(FockVector01::vacuum(len, one)),
                FockElement::Sector01(FockVector01 {
                    vacuum: C64::new(0.0, 0.0),
                    one: ExpSegment::single(len, vec![ExpTerm::new(C64::new(amplitude, 0.0), c, b)]),
                }),
            ),
            Construction::TwoUnits { kappa, .. } => (
                FockElement::Exponential(ExpVectorCombo::single(one, ExpSegment::zero(len))),
                FockElement::Exponential(ExpVectorCombo::single(
                    C64::new((-kappa * t.as_f64() / 2.0).exp(), 0.0),
                    ExpSegment::single(len, vec![ExpTerm::constant(C64::new(kappa.sqrt(), 0.0))]),
                )),
            ),
        })
    }

    /// `α_{jδ}(v)` for `v` in system coordinates.
    pub fn alpha(&self, j: u64, v: &CVec2) -> Result<FockElement> {
        let inv = self.basis.frame(j).inverse().ok_or(Error::InvalidBasis { residual: f64::INFINITY })?;
        let w = inv.apply(v);
        combine(&[(w.0[0], self.images(j)?.0), (w.0[1], self.images(j)?.1)])
    }

    /// `max |⟨α(u), α(v)⟩ − ⟨u, v⟩|` over the coordinate basis at index `j`.
    pub fn isometry_residual(&self, j: u64) -> Result<f64> {
        let basis = [CVec2::e1(), CVec2::e2()];
        let images = basis.iter().map(|v| self.alpha(j, v)).collect::<Result<Vec<_>>>()?;
        let mut worst: f64 = 0.0;
        for (p, u) in basis.iter().enumerate() {
            for (q, v) in basis.iter().enumerate() {
                worst = worst.max((images[p].inner(&images[q])? - u.inner(v)).norm());
            }
        }
        Ok(worst)
    }
}

fn combine(parts: &[(C64, FockElement)]) -> Result<FockElement> {
    let mut iter = parts.iter();
    let (k0, first) = iter.next().expect("nonempty");
    let mut acc = scale(first, *k0);
    for (k, e) in iter {
        acc = add(&acc, &scale(e, *k))?;
    }
    Ok(acc)
}

fn scale(e: &FockElement, k: C64) -> FockElement {
    match e {
        FockElement::Sector01(v) => FockElement::Sector01(FockVector01 { vacuum: v.vacuum * k, one: v.one.scale(k) }),
        FockElement::Exponential(c) => FockElement::Exponential(ExpVectorCombo {
            length: c.length,
            terms: c.terms.iter().map(|(a, g)| (a * k, g.clone())).collect(),
        }),
    }
}

fn add(a: &FockElement, b: &FockElement) -> Result<FockElement> {
    match (a, b) {
        (FockElement::Sector01(u), FockElement::Sector01(v)) => {
            if u.one.length != v.one.length {
                return Err(Error::GridMismatch);
            }
            let mut one = u.one.clone();
            // both are single-piece on the same interval in this module
            for (p, q) in one.pieces.iter_mut().zip(&v.one.pieces) {
                p.terms.extend(q.terms.iter().copied());
            }
            Ok(FockElement::Sector01(FockVector01 { vacuum: u.vacuum + v.vacuum, one }))
        }
        (FockElement::Exponential(u), FockElement::Exponential(v)) => {
            let mut terms = u.terms.clone();
            terms.extend(v.terms.iter().cloned());
            Ok(FockElement::Exponential(ExpVectorCombo { length: u.length, terms }))
        }
        _ => Err(Error::Schema("sum of different Fock representations".into())),
    }
}

/// Kernel-level discrepancy of the embedding diagram at grid indices `(j, k)`:
/// the largest entry difference among the Gram matrices of
/// `P_v = split(α_{j+k}(v))` and `Q_v = (α_j ⊗ α_k)(β_{j,k} v)` over the
/// coordinate basis, together with the isometry residuals of `α_s`, `α_t`
/// and `α_{s+t}`. All terms vanish exactly when the diagram commutes with
/// isometric embeddings.
pub fn verify_representation(rep: &Representation, sys: &FiniteGridSystem, s: Time, t: Time) -> Result<f64> {
    let step = sys.step();
    let off = |x: Time| Error::OffGrid(format!("{x} is not a multiple of {step}"));
    let j = s.index_on(step).ok_or_else(|| off(s))?;
    let k = t.index_on(step).ok_or_else(|| off(t))?;
    if j + k > sys.horizon() || j + k > rep.basis.horizon() || step != rep.basis.step {
        return Err(off(s + t));
    }
    let at = point(s);
    let domain = [CVec2::e1(), CVec2::e2()];
    let mut p = Vec::new();
    let mut q = Vec::new();
    for v in &domain {
        p.push(rep.alpha(j + k, v)?.split(at)?);
        let w = sys.beta(j, k).apply(v);
        let mut terms = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                let coef = w.0[2 * a + b];
                let left = rep.alpha(j, &unit(a))?;
                let right = rep.alpha(k, &unit(b))?;
                terms.push((coef, left, right));
            }
        }
        q.push(ProductElement(terms));
    }
    let mut worst = [j, k, j + k].iter().map(|&i| rep.isometry_residual(i)).try_fold(0.0, |m, r| r.map(|r| f64::max(m, r)))?;
    for i in 0..2 {
        for l in 0..2 {
            let pp = p[i].inner(&p[l])?;
            let qq = q[i].inner(&q[l])?;
            let pq = p[i].inner(&q[l])?;
            worst = worst.max((pp - pq).norm()).max((qq - pq).norm()).max((pp - qq).norm());
        }
    }
    Ok(worst)
}

fn unit(i: usize) -> CVec2 {
    if i == 0 {
        CVec2::e1()
    } else {
        CVec2::e2()
    }
}

/// Frames `[α(x_j) α(y_j)]` are not matrices; this exposes the Gram matrix
/// of `α(e1), α(e2)` at index `j` for diagnostics.
pub fn image_gram(rep: &Representation, j: u64) -> Result<Mat2> {
    let a = rep.alpha(j, &CVec2::e1())?;
    let b = rep.alpha(j, &CVec2::e2())?;
    Ok(Mat2([[a.inner(&a)?, a.inner(&b)?], [b.inner(&a)?, b.inner(&b)?]]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::y_norm_law;

    #[test]
    fn amplitudes() {
        assert_eq!(fock_amplitude(1.0), 1.0);
        let a = fock_amplitude(2.0);
        assert!((a * a - 2.0 * 2f64.ln() / 3.0).abs() < 1e-15);
        assert!((fock_amplitude(1.0 + 1e-9) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn one_particle_norms_follow_norm_law() {
        for c in [0.5, 1.0, 2.0] {
            let rep = build_representation(&SystemSpec::e3_rational(c, 1.0, vec![]), 12, 12).unwrap();
            for j in 1..=12 {
                let t = Time::new(j, 12).unwrap();
                let y = rep.alpha(j, rep.basis.y(j)).unwrap();
                assert!((y.norm_sqr().unwrap() - y_norm_law(c, t)).abs() < 1e-12, "c={c} t={t}");
            }
        }
    }

    #[test]
    fn two_unit_overlap() {
        let rep = build_representation(&SystemSpec::E1 { a: 0.5 }, 4, 4).unwrap();
        for j in 1..=4 {
            let x = rep.alpha(j, rep.basis.x(j)).unwrap();
            let y = rep.alpha(j, rep.basis.y(j)).unwrap();
            assert!((x.inner(&y).unwrap() - C64::new(0.5f64.powf(j as f64 / 4.0), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn diagram_commutes_and_detects_perturbation() {
        let rep = build_representation(&SystemSpec::e3_rational(1.0, 0.0, vec![]), 2, 2).unwrap();
        let half = Time::new(1, 2).unwrap();
        assert!(verify_representation(&rep, &rep.system, half, half).unwrap() <= 1e-12);
        let Construction::FockOneParticle { c, b, amplitude } = rep.construction else { panic!() };
        let bad = rep.with_construction(Construction::FockOneParticle { c, b, amplitude: amplitude * 1.01 });
        let r = bad.isometry_residual(1).unwrap();
        // relative: α(e2) = α(y)/‖y‖ and ‖α(y)‖² grows by 1.01²
        assert!((r - 0.0201).abs() < 1e-12, "{r}");
        assert!((verify_representation(&bad, &rep.system, half, half).unwrap() - 0.0201).abs() < 1e-12);

        let rep = build_representation(&SystemSpec::E1 { a: 0.5 }, 2, 2).unwrap();
        assert!(verify_representation(&rep, &rep.system, half, half).unwrap() <= 1e-12);
    }

    #[test]
    fn refuses_non_embeddable() {
        assert!(matches!(build_representation(&SystemSpec::E4, 2, 2), Err(Error::NotEmbeddable(_))));
    }
}
