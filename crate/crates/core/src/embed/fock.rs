//! Vectors in the symmetric Fock space over `L²(0, t)` that the embeddings
//! need: the vacuum-plus-one-particle sector and finite combinations of
//! exponential vectors. Splitting at `s` realizes
//! `Γ(L²(0, s+t)) ≅ Γ(L²(0, s)) ⊗ Γ(L²(0, t))`.

use serde::Serialize;

use crate::embed::segment::{ExpSegment, Point};
use crate::error::{Error, Result};
use crate::C64;

/// `vacuum ⊕ one` in `C ⊕ L²(0, t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FockVector01 {
    pub vacuum: C64,
    pub one: ExpSegment,
}

impl FockVector01 {
    pub fn vacuum(length: Point, amplitude: C64) -> Self {
        FockVector01 { vacuum: amplitude, one: ExpSegment::zero(length) }
    }

    pub fn inner(&self, other: &FockVector01) -> Result<C64> {
        Ok(self.vacuum * other.vacuum.conj() + self.one.inner(&other.one)?)
    }

    pub fn norm_sqr(&self) -> Result<f64> {
        Ok(self.inner(self)?.re)
    }
}

/// `Σ aᵢ e(gᵢ)` with `⟨e(f), e(g)⟩ = exp⟨f, g⟩`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpVectorCombo {
    pub length: Point,
    pub terms: Vec<(C64, ExpSegment)>,
}

/// Most negative value tolerated for a kernel norm.
pub const PSD_SLACK: f64 = 1e-10;

impl ExpVectorCombo {
    pub fn single(coef: C64, g: ExpSegment) -> Self {
        ExpVectorCombo { length: g.length, terms: vec![(coef, g)] }
    }

    pub fn inner(&self, other: &ExpVectorCombo) -> Result<C64> {
        if self.length != other.length {
            return Err(Error::GridMismatch);
        }
        let mut acc = C64::new(0.0, 0.0);
        for (a, f) in &self.terms {
            for (b, g) in &other.terms {
                acc += a * b.conj() * f.inner(g)?.exp();
            }
        }
        Ok(acc)
    }

    /// Squared norm; fails when the kernel Gram form is not positive.
    pub fn norm_sqr(&self) -> Result<f64> {
        let n = self.inner(self)?.re;
        if n < -PSD_SLACK {
            return Err(Error::Inconsistent { relation: "exponential kernel positivity".into(), residual: -n });
        }
        Ok(n)
    }
}

/// A vector of either sector kind.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FockElement {
    Sector01(FockVector01),
    Exponential(ExpVectorCombo),
}

impl FockElement {
    pub fn inner(&self, other: &FockElement) -> Result<C64> {
        match (self, other) {
            (FockElement::Sector01(a), FockElement::Sector01(b)) => a.inner(b),
            (FockElement::Exponential(a), FockElement::Exponential(b)) => a.inner(b),
            _ => Err(Error::Schema("inner product of different Fock representations".into())),
        }
    }

    pub fn norm_sqr(&self) -> Result<f64> {
        Ok(self.inner(self)?.re)
    }

    /// Image under `Γ(0, s+t) → Γ(0, s) ⊗ Γ(0, t)` at `s = at`.
    pub fn split(&self, at: Point) -> Result<ProductElement> {
        match self {
            FockElement::Sector01(v) => {
                let (f1, f2) = v.one.split(at)?;
                let rest = v.one.length - at;
                let one = C64::new(1.0, 0.0);
                let vac = |len: Point| FockElement::Sector01(FockVector01::vacuum(len, one));
                Ok(ProductElement(vec![
                    (v.vacuum, vac(at), vac(rest)),
                    (one, FockElement::Sector01(FockVector01 { vacuum: C64::new(0.0, 0.0), one: f1 }), vac(rest)),
                    (one, vac(at), FockElement::Sector01(FockVector01 { vacuum: C64::new(0.0, 0.0), one: f2 })),
                ]))
            }
            FockElement::Exponential(c) => c
                .terms
                .iter()
                .map(|(a, g)| {
                    let (g1, g2) = g.split(at)?;
                    Ok((
                        *a,
                        FockElement::Exponential(ExpVectorCombo::single(C64::new(1.0, 0.0), g1)),
                        FockElement::Exponential(ExpVectorCombo::single(C64::new(1.0, 0.0), g2)),
                    ))
                })
                .collect::<Result<Vec<_>>>()
                .map(ProductElement),
        }
    }
}

/// `Σ cᵢ Fᵢ ⊗ Gᵢ` in `Γ(0, s) ⊗ Γ(0, t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductElement(pub Vec<(C64, FockElement, FockElement)>);

impl ProductElement {
    pub fn inner(&self, other: &ProductElement) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (a, f, g) in &self.0 {
            for (b, f2, g2) in &other.0 {
                acc += a * b.conj() * f.inner(f2)? * g.inner(g2)?;
            }
        }
        Ok(acc)
    }
}
