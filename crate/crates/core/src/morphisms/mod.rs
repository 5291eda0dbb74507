//! Automorphisms of classified systems.
//!
//! An automorphism is written as a word `trivial(c) ∘ swap? ∘ extra(b)?` and
//! realized in the canonical frame `F_j = [x_j y_j]` as `θ_j = F_j M_j F_j⁻¹`
//! with `M_j = e^{icj} S D_j`. Times are grid indices, matching the grid-unit
//! parameters of [`Classification`]. The extra phase family depends on type:
//!
//! | type        | `D_j`                                              |
//! |-------------|----------------------------------------------------|
//! | `E1(0)`     | `diag(1, e^{ibj})`                                 |
//! | `E2(0)`     | `diag(e^{ib}, e^{-ib})` at odd `j`, identity at even `j` |
//! | `E3,E4,E5`  | `diag(1, e^{ib})`                                  |
//!
//! `swap` exchanges `x_j` and `y_j` and is only defined for `E1`/`E2`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::classify::{intertwining_residual, product_directions, Classification};
use crate::error::{Error, Result};
use crate::num::{phase, CVec2, Mat2, Tolerance, ONE, ZERO};
use crate::system::{condition_residual, wrap_angle, CanonicalBasis, FiniteGridSystem, SystemSpec, TypeTag};
use crate::C64;

/// Generator word; phases live in `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Word {
    pub c: f64,
    #[serde(default)]
    pub swap: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra: Option<f64>,
}

impl Word {
    pub fn identity() -> Self {
        Word { c: 0.0, swap: false, extra: None }
    }

    pub fn trivial(c: f64) -> Self {
        Word { c, swap: false, extra: None }
    }

    fn reduced(self) -> Self {
        Word { c: wrap_angle(self.c), swap: self.swap, extra: self.extra.map(wrap_angle) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Automorphism {
    pub word: Word,
    /// `θ_j` in the system's coordinates, `j = 1..=K`.
    pub thetas: Vec<Mat2>,
}

fn diag(p: C64, q: C64) -> Mat2 {
    Mat2([[p, ZERO], [ZERO, q]])
}

fn swap_matrix() -> Mat2 {
    Mat2([[ZERO, ONE], [ONE, ZERO]])
}

/// Whether the extra family exists for `spec`, and which.
fn extra_kind(spec: &SystemSpec) -> Option<&'static str> {
    match spec {
        SystemSpec::E1 { a } if *a == 0.0 => Some("exponential phase on y"),
        SystemSpec::E2 { a } if *a == 0.0 => Some("odd-time opposite phases"),
        SystemSpec::E3(_) | SystemSpec::E4 | SystemSpec::E5 => Some("constant phase on y"),
        _ => None,
    }
}

fn extra_matrix(spec: &SystemSpec, b: f64, j: u64) -> Mat2 {
    match spec.type_tag() {
        TypeTag::E1 => diag(ONE, phase(b * j as f64)),
        TypeTag::E2 if j % 2 == 1 => diag(phase(b), phase(-b)),
        TypeTag::E2 => Mat2::identity(),
        _ => diag(ONE, phase(b)),
    }
}

fn check_word(spec: &SystemSpec, word: &Word) -> Result<()> {
    let inadmissible = |generator| Error::InadmissibleGenerator { generator, type_name: spec.to_string() };
    if word.swap && !matches!(spec.type_tag(), TypeTag::E1 | TypeTag::E2) {
        return Err(inadmissible("swap"));
    }
    if word.extra.is_some() && extra_kind(spec).is_none() {
        return Err(inadmissible("extra"));
    }
    if !word.c.is_finite() || word.extra.is_some_and(|b| !b.is_finite()) {
        return Err(Error::InvalidSpec("non-finite phase".into()));
    }
    Ok(())
}

/// `M_j` in the canonical frame.
fn word_matrix(spec: &SystemSpec, word: &Word, j: u64) -> Mat2 {
    let mut m = Mat2::scalar(phase(word.c * j as f64));
    if word.swap {
        m = m.mul(&swap_matrix());
    }
    if let Some(b) = word.extra {
        m = m.mul(&extra_matrix(spec, b, j));
    }
    m
}

fn frame_inverse(basis: &CanonicalBasis, j: u64) -> Result<Mat2> {
    basis.frame(j).inverse().ok_or(Error::InvalidBasis { residual: f64::INFINITY })
}

/// Realize `word` on the basis recovered by the classifier.
pub fn make_automorphism(class: &Classification, word: Word) -> Result<Automorphism> {
    realize(&class.spec, &class.basis, word)
}

fn realize(spec: &SystemSpec, basis: &CanonicalBasis, word: Word) -> Result<Automorphism> {
    check_word(spec, &word)?;
    let thetas = (1..=basis.horizon())
        .map(|j| Ok(basis.frame(j).mul(&word_matrix(spec, &word, j)).mul(&frame_inverse(basis, j)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Automorphism { word: word.reduced(), thetas })
}

/// Diagram residual `max ‖β_{s,t}θ_{s+t}u − (θ_s⊗θ_t)β_{s,t}u‖`.
pub fn verify_automorphism(sys: &FiniteGridSystem, thetas: &[Mat2]) -> Result<f64> {
    intertwining_residual(sys, sys, thetas)
}

/// Pointwise product `θ_j = φ_j ψ_j`.
pub fn compose(phi: &[Mat2], psi: &[Mat2]) -> Vec<Mat2> {
    phi.iter().zip(psi).map(|(a, b)| a.mul(b)).collect()
}

pub fn max_family_diff(a: &[Mat2], b: &[Mat2]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p.max_abs_diff(q)).fold(0.0, f64::max)
}

/// Tolerance for matching a decomposed word back to its family.
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-9;

/// Recover the generator word of an automorphism family.
pub fn decompose_automorphism(
    sys: &FiniteGridSystem,
    class: &Classification,
    thetas: &[Mat2],
    tol: &Tolerance,
) -> Result<Word> {
    decompose_on(sys, &class.spec, &class.basis, thetas, tol)
}

fn decompose_on(
    sys: &FiniteGridSystem,
    spec: &SystemSpec,
    basis: &CanonicalBasis,
    thetas: &[Mat2],
    tol: &Tolerance,
) -> Result<Word> {
    let unitarity = thetas.iter().map(Mat2::unitarity_residual).fold(0.0, f64::max);
    let residual = verify_automorphism(sys, thetas)?.max(unitarity);
    if !(residual <= tol.eps_structural) {
        return Err(Error::NotAnAutomorphism { residual });
    }
    let canon = |j: u64| -> Result<Mat2> { Ok(frame_inverse(basis, j)?.mul(&thetas[(j - 1) as usize]).mul(&basis.frame(j))) };
    let m1 = canon(1)?;
    let swap = matches!(spec.type_tag(), TypeTag::E1 | TypeTag::E2) && m1.0[1][0].norm() > m1.0[0][0].norm();
    let n1 = if swap { swap_matrix().mul(&m1) } else { m1 };
    let (px, py) = (n1.0[0][0].arg(), n1.0[1][1].arg());

    let word = match extra_kind(spec) {
        None => Word { c: px, swap, extra: None },
        Some(_) if spec.type_tag() == TypeTag::E2 => {
            // e^{ic}·diag(e^{ib}, e^{-ib}) fixes c only modulo π; keep c in [0, π)
            let c = wrap_angle((px + py) / 2.0) % PI;
            Word { c, swap, extra: Some(px - c) }
        }
        Some(_) => Word { c: px, swap, extra: Some(py - px) },
    }
    .reduced();

    let rebuilt = realize(spec, basis, word)?;
    let miss = max_family_diff(&rebuilt.thetas, thetas);
    if !(miss <= DECOMPOSITION_TOLERANCE) {
        return Err(Error::DecompositionFailed { residual: miss });
    }
    Ok(word)
}

/// `R_m` on a basis of a system of type `tag`: subsample, and for `E3`
/// divide `y` by `‖y_m‖`.
pub fn restrict_basis(basis: &CanonicalBasis, tag: TypeTag, m: u64) -> Result<CanonicalBasis> {
    if m == 0 {
        return Err(Error::Schema("restriction factor must be positive".into()));
    }
    if basis.horizon() < 2 * m {
        return Err(Error::HorizonTooSmall { horizon: basis.horizon(), needed: 2 * m });
    }
    let sub = basis.subsample(m);
    Ok(if tag == TypeTag::E3 && m > 1 { sub.scale_y(basis.y(m).norm()) } else { sub })
}

pub fn restrict_basis_rm(class: &Classification, m: u64) -> Result<CanonicalBasis> {
    restrict_basis(&class.basis, class.spec.type_tag(), m)
}

/// `S_m`: `(θ_{mj})_j`.
pub fn restrict_automorphism_sm(thetas: &[Mat2], m: u64) -> Vec<Mat2> {
    let m = m.max(1) as usize;
    let k = thetas.len() / m;
    (1..=k).map(|j| thetas[m * j - 1]).collect()
}

/// Restricted system with its classification read off `R_m` of the basis.
pub fn restrict_classified(
    sys: &FiniteGridSystem,
    class: &Classification,
    m: u64,
) -> Result<(FiniteGridSystem, Classification)> {
    let rsys = sys.restrict(m)?;
    let basis = restrict_basis_rm(class, m)?;
    let spec = class.spec.restricted(m);
    let residual = condition_residual(&rsys, &spec, &basis).residual;
    let margin = product_directions(rsys.beta(1, 1), &Tolerance::default())
        .map(|r| r.discriminant_margin)
        .unwrap_or(f64::INFINITY);
    Ok((
        rsys,
        Classification {
            raw_a: spec.param_a(),
            spec,
            basis,
            residual,
            discriminant_margin: margin,
            small_a_threshold: class.small_a_threshold,
            rational: None,
        },
    ))
}

fn lift_word(spec: &SystemSpec, restricted: &SystemSpec, m: u64, w: Word) -> Result<Word> {
    let extra = match (w.extra, spec.type_tag(), restricted.type_tag()) {
        (None, ..) => None,
        (Some(b), TypeTag::E1, TypeTag::E1) => Some(b / m as f64),
        (Some(b), TypeTag::E2, TypeTag::E1) => {
            if wrap_angle(b).min(TAU - wrap_angle(b)) <= DECOMPOSITION_TOLERANCE {
                None
            } else {
                return Err(Error::NotLiftable(format!(
                    "exponential y-phase b={b} on the restriction of {spec} to multiples of {m} has no preimage"
                )));
            }
        }
        (Some(b), ..) => Some(b),
    };
    Ok(Word { c: w.c / m as f64, swap: w.swap, extra })
}

/// Lift an automorphism of the restriction to multiples of `m`.
pub fn lift_automorphism(
    sys: &FiniteGridSystem,
    class: &Classification,
    m: u64,
    restricted_thetas: &[Mat2],
    tol: &Tolerance,
) -> Result<Automorphism> {
    let (rsys, rclass) = restrict_classified(sys, class, m)?;
    let word = decompose_automorphism(&rsys, &rclass, restricted_thetas, tol)?;
    let lifted = make_automorphism(class, lift_word(&class.spec, &rclass.spec, m, word)?)?;
    let back = max_family_diff(&restrict_automorphism_sm(&lifted.thetas, m), restricted_thetas);
    if !(back <= DECOMPOSITION_TOLERANCE) {
        return Err(Error::DecompositionFailed { residual: back });
    }
    Ok(lifted)
}

/// Find a basis `b` of the full system with `R_m(b) = target`.
pub fn check_rm_surjectivity(
    sys: &FiniteGridSystem,
    class: &Classification,
    m: u64,
    target: &CanonicalBasis,
    tol: &Tolerance,
) -> Result<CanonicalBasis> {
    let (rsys, rclass) = restrict_classified(sys, class, m)?;
    if target.horizon() != rclass.basis.horizon() {
        return Err(Error::GridMismatch);
    }
    let own = condition_residual(&rsys, &rclass.spec, target).residual;
    if !(own <= tol.eps_structural) {
        return Err(Error::InvalidBasis { residual: own });
    }
    let thetas = (1..=target.horizon())
        .map(|j| Ok(target.frame(j).mul(&frame_inverse(&rclass.basis, j)?)))
        .collect::<Result<Vec<_>>>()?;
    let lifted = lift_automorphism(sys, class, m, &thetas, tol)?;
    Ok(class.basis.transform(&lifted.thetas))
}

/// Apply a family to a single vector at grid index `j`.
pub fn apply_at(thetas: &[Mat2], j: u64, v: &CVec2) -> CVec2 {
    thetas[(j - 1) as usize].apply(v)
}
