//! Classification of concrete systems up to isomorphism.
//!
//! The product-vector structure of `β_{1,1}` singles out the type; the
//! canonical basis at grid index 1 is read off the product directions and then
//! pulled back through `β_{1,j-1}*` to every grid index. The recovered basis is
//! checked against the full condition of its type over all grid pairs, which
//! also cross-checks `λ` against every `β_{s,t}`.

pub mod product;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{kron, product_factors, CVec2, CVec4, Mat2, Tolerance};
use crate::system::grid::grid_pairs;
use crate::system::{condition_residual, CanonicalBasis, FiniteGridSystem, SystemSpec, TypeTag};
use crate::C64;

pub use product::{product_directions, wedge, ProductReport, ProductStructure};

/// Rational-time reading of an `E3` grid system with step `δ`:
/// `c = |λ_δ|^{1/δ}` and `η_{jδ} = (λ_δ/|λ_δ|)^j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalType3 {
    pub c: f64,
    pub eta: Vec<C64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    /// Type and parameters with one grid step as the time unit.
    pub spec: SystemSpec,
    pub basis: CanonicalBasis,
    /// Worst deviation of `basis` from the condition of `spec`.
    pub residual: f64,
    pub discriminant_margin: f64,
    /// `|⟨x₁, y₁⟩|` before the small-`a` policy (`E1`/`E2` only).
    pub raw_a: Option<f64>,
    /// Threshold below which `a` is reported as 0.
    pub small_a_threshold: f64,
    pub rational: Option<RationalType3>,
}

fn inconsistent(relation: impl Into<String>, residual: f64) -> Error {
    Error::Inconsistent { relation: relation.into(), residual }
}

/// Rotate `y` so that `⟨x, y⟩` is real and nonnegative.
fn align(x: &CVec2, y: &CVec2) -> CVec2 {
    let g = x.inner(y);
    if g.norm() == 0.0 {
        *y
    } else {
        y.scale(g / g.norm())
    }
}

/// Pull back `target ∈ E_1 ⊗ E_{j-1}` through `β_{1,j-1}`.
fn pull_back(sys: &FiniteGridSystem, j: u64, target: &CVec4, tol: &Tolerance, what: &str) -> Result<CVec2> {
    let b = sys.beta(1, j - 1);
    let v = b.adjoint_apply(target);
    let miss = b.apply(&v).dist(target);
    if miss > tol.eps_structural * target.norm().max(1.0) {
        return Err(inconsistent(format!("beta(1,{}) {what}_{j} in range", j - 1), miss));
    }
    Ok(v)
}

fn factor_pair(dir: &CVec4) -> Result<(CVec2, CVec2)> {
    product_factors(dir).ok_or_else(|| inconsistent("nonzero product direction", 1.0))
}

/// Classify `sys` up to isomorphism.
pub fn classify(sys: &FiniteGridSystem, tol: &Tolerance) -> Result<Classification> {
    sys.validate(tol)?;
    let report = product_directions(sys.beta(1, 1), tol)?;
    let collinear = |u: &CVec2, v: &CVec2| wedge(u, v) <= tol.eps_structural.sqrt();
    let small_a = tol.eps_structural;
    let mut raw_a = None;

    let (spec, x1, y1) = match report.structure {
        ProductStructure::FirstFactorFixed { v } => (SystemSpec::E5, v, v.orthogonal()),
        ProductStructure::SecondFactorFixed { v } => (SystemSpec::E4, v, v.orthogonal()),
        ProductStructure::GenericPair { dir1, dir2 } => {
            let (u1, v1) = factor_pair(&dir1)?;
            let (u2, v2) = factor_pair(&dir2)?;
            match (collinear(&u1, &v1), collinear(&u2, &v2)) {
                (true, true) => {
                    let x = u1.fix_phase();
                    let g = x.inner(&u2).norm();
                    raw_a = Some(g);
                    let (a, y) = if g <= small_a { (0.0, u2.fix_phase()) } else { (g, align(&x, &u2)) };
                    (SystemSpec::E1 { a }, x, y)
                }
                (false, false) => {
                    // dir1 ∝ x⊗y, dir2 ∝ y⊗x
                    let x = u1.fix_phase();
                    let back = wedge(&v2, &u1).max(wedge(&u2, &v1));
                    if back > tol.eps_structural.sqrt() {
                        return Err(inconsistent("product directions x⊗y and y⊗x", back));
                    }
                    let g = x.inner(&v1).norm();
                    raw_a = Some(g);
                    let (a, y) = if g <= small_a { (0.0, v1.fix_phase()) } else { (g, align(&x, &v1)) };
                    (SystemSpec::E2 { a }, x, y)
                }
                _ => return Err(inconsistent("both product directions of the same kind", 1.0)),
            }
        }
        ProductStructure::DoubleRoot { dir } => {
            let (u, v) = factor_pair(&dir)?;
            if !collinear(&u, &v) {
                return Err(inconsistent("double product direction x⊗x", wedge(&u, &v)));
            }
            let x = u.fix_phase();
            let y = x.orthogonal();
            let b = sys.beta(1, 1);
            let w = b
                .cols
                .iter()
                .map(|c| c.sub(&dir.scale(c.inner(&dir))))
                .max_by(|p, q| p.norm().total_cmp(&q.norm()))
                .expect("two columns");
            let a_coef = w.inner(&kron(&y, &x));
            let b_coef = w.inner(&kron(&x, &y));
            if a_coef.norm() <= tol.eps_structural * w.norm() {
                return Err(inconsistent("y⊗x component of beta(1,1) y_2", a_coef.norm()));
            }
            (SystemSpec::e3(b_coef / a_coef), x, y)
        }
    };

    let horizon = sys.horizon();
    let mut xs = vec![x1];
    let mut ys = vec![y1];
    let lambda = spec.lambda();
    for j in 2..=horizon {
        let (xp, yp) = (xs[(j - 2) as usize], ys[(j - 2) as usize]);
        let (tx, ty) = match spec.type_tag() {
            TypeTag::E1 => (kron(&x1, &xp), kron(&y1, &yp)),
            TypeTag::E2 => (kron(&x1, &yp), kron(&y1, &xp)),
            TypeTag::E3 => (kron(&x1, &xp), kron(&y1, &xp).add(&kron(&x1, &yp).scale(lambda.unwrap()))),
            TypeTag::E4 => (kron(&x1, &xp), kron(&y1, &xp)),
            TypeTag::E5 => (kron(&x1, &xp), kron(&x1, &yp)),
        };
        xs.push(pull_back(sys, j, &tx, tol, "x")?);
        ys.push(pull_back(sys, j, &ty, tol, "y")?);
    }
    let basis = CanonicalBasis { step: sys.step(), x: xs, y: ys };

    let cond = condition_residual(sys, &spec, &basis);
    if !(cond.residual <= tol.eps_structural) {
        return Err(inconsistent(cond.worst_relation, cond.residual));
    }

    let rational = match (&spec, sys.step().num() == 1 && sys.step().den() == 1) {
        (SystemSpec::E3(_), false) => {
            let l = spec.lambda().unwrap();
            let unit = l / l.norm();
            Some(RationalType3 {
                c: l.norm().powf(1.0 / sys.step().as_f64()),
                eta: (1..=horizon).map(|j| unit.powu(j as u32)).collect(),
            })
        }
        _ => None,
    };

    Ok(Classification {
        spec,
        basis,
        residual: cond.residual,
        discriminant_margin: report.discriminant_margin,
        raw_a,
        small_a_threshold: small_a,
        rational,
    })
}

/// An explicit isomorphism `θ_t: E_t → F_t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Isomorphism {
    pub thetas: Vec<Mat2>,
    pub residual: f64,
}

/// Max over grid pairs and basis vectors of `‖γ_{s,t}θ_{s+t}u − (θ_s⊗θ_t)β_{s,t}u‖`.
pub fn intertwining_residual(from: &FiniteGridSystem, to: &FiniteGridSystem, thetas: &[Mat2]) -> Result<f64> {
    if from.step() != to.step() || from.horizon() != to.horizon() {
        return Err(Error::GridMismatch);
    }
    from.check_family_len(thetas)?;
    let th = |j: u64| &thetas[(j - 1) as usize];
    let mut worst: f64 = 0.0;
    for (s, t) in grid_pairs(from.horizon()) {
        for u in [CVec2::e1(), CVec2::e2()] {
            let lhs = to.beta(s, t).apply(&th(s + t).apply(&u));
            let rhs = th(s).kron_apply(th(t), &from.beta(s, t).apply(&u));
            worst = worst.max(lhs.dist(&rhs));
        }
    }
    Ok(worst)
}

/// Decide whether `a` and `b` are isomorphic; on success return `θ_t`
/// mapping the recovered basis of `a` onto that of `b`.
pub fn decide_isomorphic(a: &FiniteGridSystem, b: &FiniteGridSystem, tol: &Tolerance) -> Result<Option<Isomorphism>> {
    if a.step() != b.step() || a.horizon() != b.horizon() {
        return Err(Error::GridMismatch);
    }
    let ca = classify(a, tol)?;
    let cb = classify(b, tol)?;
    if !ca.spec.approx_eq(&cb.spec, tol.eps_structural) {
        return Ok(None);
    }
    let thetas = (1..=a.horizon())
        .map(|j| {
            let inv = ca.basis.frame(j).inverse().ok_or_else(|| inconsistent("independent basis", 0.0))?;
            Ok(cb.basis.frame(j).mul(&inv))
        })
        .collect::<Result<Vec<_>>>()?;
    let residual = intertwining_residual(a, b, &thetas)?;
    Ok(Some(Isomorphism { thetas, residual }))
}
