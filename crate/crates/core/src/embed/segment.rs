//! Piecewise exponential functions on `(0, t)` with closed-form inner products.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::Time;
use crate::C64;

/// Exact rational point on the time axis (zero allowed).
pub type Point = Ratio<u64>;

pub fn point(t: Time) -> Point {
    Ratio::new(t.num(), t.den())
}

fn to_f64(p: Point) -> f64 {
    *p.numer() as f64 / *p.denom() as f64
}

/// `κ` below which the integral switches to its Taylor expansion.
pub const DEGENERATE_KAPPA: f64 = 1e-8;

/// `s ↦ A c^s e^{ibs}` with `s` the absolute position in the segment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpTerm {
    pub amplitude: C64,
    pub growth: f64,
    pub frequency: f64,
}

impl ExpTerm {
    pub fn new(amplitude: C64, growth: f64, frequency: f64) -> Self {
        ExpTerm { amplitude, growth, frequency }
    }

    pub fn constant(amplitude: C64) -> Self {
        ExpTerm::new(amplitude, 1.0, 0.0)
    }

    pub fn eval(&self, s: f64) -> C64 {
        self.amplitude * C64::from_polar(self.growth.powf(s), self.frequency * s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Piece {
    pub lo: Point,
    pub hi: Point,
    pub terms: Vec<ExpTerm>,
}

/// A function on `(0, length)` given by consecutive pieces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpSegment {
    pub length: Point,
    pub pieces: Vec<Piece>,
}

/// `e^z - 1` without cancellation for small `|z|`.
pub fn expm1(z: C64) -> C64 {
    let (x, y) = (z.re, z.im);
    let half = (y / 2.0).sin();
    C64::new(x.exp_m1() * y.cos() - 2.0 * half * half, x.exp() * y.sin())
}

/// `∫_lo^hi e^{κ s} ds`.
pub fn exp_integral(kappa: C64, lo: f64, hi: f64) -> C64 {
    let len = hi - lo;
    let z = kappa * len;
    let ratio = if kappa.norm() < DEGENERATE_KAPPA {
        // (e^z - 1)/z = 1 + z/2 + z²/6 + …; exactly 1 in the degenerate case
        C64::new(1.0, 0.0) + z / 2.0 + z * z / 6.0
    } else {
        expm1(z) / z
    };
    (kappa * lo).exp() * len * ratio
}

/// `∫_lo^hi f(s) conj(g(s)) ds` for single terms.
fn term_inner(f: &ExpTerm, g: &ExpTerm, lo: f64, hi: f64) -> C64 {
    let kappa = C64::new((f.growth * g.growth).ln(), f.frequency - g.frequency);
    f.amplitude * g.amplitude.conj() * exp_integral(kappa, lo, hi)
}

impl ExpSegment {
    /// The zero function on `(0, length)`.
    pub fn zero(length: Point) -> Self {
        ExpSegment { length, pieces: vec![Piece { lo: Point::from_integer(0), hi: length, terms: vec![] }] }
    }

    /// One piece covering `(0, length)`.
    pub fn single(length: Point, terms: Vec<ExpTerm>) -> Self {
        ExpSegment { length, pieces: vec![Piece { lo: Point::from_integer(0), hi: length, terms }] }
    }

    /// Check that the pieces tile `(0, length)` and every term is finite.
    pub fn check(&self) -> Result<()> {
        let mut at = Point::from_integer(0);
        for p in &self.pieces {
            if p.lo != at || p.hi <= p.lo {
                return Err(Error::Schema(format!("segment pieces do not tile (0,{})", self.length)));
            }
            if p.terms.iter().any(|t| !(t.amplitude.is_finite() && t.growth > 0.0 && t.frequency.is_finite())) {
                return Err(Error::Schema("segment term is not finite".into()));
            }
            at = p.hi;
        }
        if at != self.length {
            return Err(Error::Schema(format!("segment pieces do not tile (0,{})", self.length)));
        }
        Ok(())
    }

    pub fn eval(&self, s: f64) -> C64 {
        self.pieces
            .iter()
            .find(|p| to_f64(p.lo) <= s && s <= to_f64(p.hi))
            .map(|p| p.terms.iter().map(|t| t.eval(s)).sum())
            .unwrap_or_default()
    }

    pub fn scale(&self, k: C64) -> Self {
        let mut out = self.clone();
        for p in &mut out.pieces {
            for t in &mut p.terms {
                t.amplitude *= k;
            }
        }
        out
    }

    /// `⟨f, g⟩ = ∫ f conj(g)`, in closed form.
    pub fn inner(&self, other: &ExpSegment) -> Result<C64> {
        if self.length != other.length {
            return Err(Error::GridMismatch);
        }
        let mut acc = C64::new(0.0, 0.0);
        for p in &self.pieces {
            for q in &other.pieces {
                let (lo, hi) = (p.lo.max(q.lo), p.hi.min(q.hi));
                if lo >= hi {
                    continue;
                }
                let (lo, hi) = (to_f64(lo), to_f64(hi));
                for f in &p.terms {
                    for g in &q.terms {
                        acc += term_inner(f, g, lo, hi);
                    }
                }
            }
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).expect("same length").re
    }

    /// Split at `at` into the part on `(0, at)` and the part on
    /// `(at, length)` moved to `(0, length - at)`.
    pub fn split(&self, at: Point) -> Result<(ExpSegment, ExpSegment)> {
        if at <= Point::from_integer(0) || at >= self.length {
            return Err(Error::OffGrid(format!("split point {at} outside (0,{})", self.length)));
        }
        let shift = to_f64(at);
        let mut left = Vec::new();
        let mut right = Vec::new();
        for p in &self.pieces {
            if p.lo < at {
                left.push(Piece { lo: p.lo, hi: p.hi.min(at), terms: p.terms.clone() });
            }
            if p.hi > at {
                let terms = p
                    .terms
                    .iter()
                    .map(|t| ExpTerm { amplitude: t.eval(shift), growth: t.growth, frequency: t.frequency })
                    .collect();
                right.push(Piece { lo: p.lo.max(at) - at, hi: p.hi - at, terms });
            }
        }
        Ok((
            ExpSegment { length: at, pieces: left },
            ExpSegment { length: self.length - at, pieces: right },
        ))
    }
}
