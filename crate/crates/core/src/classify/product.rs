//! Product vectors in the range of `β_{1,1}`.
//!
//! Writing a range vector as `β(c₁, c₂) = c₁ b₁ + c₂ b₂`, the reshape
//! determinant is a binary quadratic form `q₀c₁² + q₁c₁c₂ + q₂c₂²`. Its
//! projective roots are exactly the product directions.

use num_complex::ComplexFloat;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{check_isometry, product_factors, reshape_det, CVec2, CVec4, Isometry42, Tolerance};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProductStructure {
    /// Two distinct product lines.
    GenericPair { dir1: CVec4, dir2: CVec4 },
    /// A single product line (double root).
    DoubleRoot { dir: CVec4 },
    /// Every range vector is `v ⊗ (·)`.
    FirstFactorFixed { v: CVec2 },
    /// Every range vector is `(·) ⊗ v`.
    SecondFactorFixed { v: CVec2 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProductReport {
    pub structure: ProductStructure,
    /// `[q₀, q₁, q₂]`.
    pub coefficients: [C64; 3],
    /// `|q₁² − 4q₀q₂| / max|q|²`; zero for the all-products case.
    pub discriminant_margin: f64,
}

/// `|u ∧ v|` for unit vectors: the sine of the angle between the lines.
pub fn wedge(u: &CVec2, v: &CVec2) -> f64 {
    (u.0[0] * v.0[1] - u.0[1] * v.0[0]).norm()
}

fn quadratic_coefficients(m: &Isometry42) -> [C64; 3] {
    let (a, b) = (&m.cols[0].0, &m.cols[1].0);
    let q0 = reshape_det(&m.cols[0]);
    let q2 = reshape_det(&m.cols[1]);
    let q1 = a[0] * b[3] + b[0] * a[3] - a[1] * b[2] - b[1] * a[2];
    [q0, q1, q2]
}

fn unit(w: CVec4) -> Result<CVec4> {
    w.normalized().ok_or_else(|| Error::Inconsistent { relation: "nonzero product direction".into(), residual: 1.0 })
}

/// Classify the product-vector structure of `β_{1,1}(E_2)`.
pub fn product_directions(beta11: &Isometry42, tol: &Tolerance) -> Result<ProductReport> {
    let residual = check_isometry(beta11);
    if residual > tol.eps_structural {
        return Err(Error::NotIsometric { s: 1, t: 1, residual });
    }
    let q = quadratic_coefficients(beta11);
    let scale = q.iter().map(|z| z.norm()).fold(0.0, f64::max);

    if scale <= tol.eps_structural {
        let (u1, v1) = product_factors(&beta11.cols[0]).ok_or(Error::Schema("zero column".into()))?;
        let (u2, v2) = product_factors(&beta11.cols[1]).ok_or(Error::Schema("zero column".into()))?;
        let structure = if wedge(&v1, &v2) <= wedge(&u1, &u2) {
            ProductStructure::SecondFactorFixed { v: v1.fix_phase() }
        } else {
            ProductStructure::FirstFactorFixed { v: u1.fix_phase() }
        };
        return Ok(ProductReport { structure, coefficients: q, discriminant_margin: 0.0 });
    }

    // Solve in the better-conditioned chart: c₂ = 1 when |q₀| ≥ |q₂|, else c₁ = 1.
    let (lead, mid, last, first_chart) =
        if q[0].norm() >= q[2].norm() { (q[0], q[1], q[2], true) } else { (q[2], q[1], q[0], false) };
    // Roots as projective points (num : den) of the chart variable, avoiding division.
    let point = |num: C64, den: C64| {
        if first_chart {
            beta11.apply(&CVec2::new(num, den))
        } else {
            beta11.apply(&CVec2::new(den, num))
        }
    };
    let disc = mid * mid - 4.0 * lead * last;
    let margin = disc.norm() / (scale * scale);
    let structure = if margin <= tol.eps_structural {
        ProductStructure::DoubleRoot { dir: unit(point(-mid, 2.0 * lead))? }
    } else {
        let sq = disc.sqrt();
        let qq = if (mid.conj() * sq).re() >= 0.0 { -(mid + sq) / 2.0 } else { -(mid - sq) / 2.0 };
        ProductStructure::GenericPair { dir1: unit(point(qq, lead))?, dir2: unit(point(last, qq))? }
    };
    Ok(ProductReport { structure, coefficients: q, discriminant_margin: margin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::kron;
    use crate::system::{generate_canonical, scramble, SystemSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn beta11(spec: &SystemSpec) -> Isometry42 {
        *generate_canonical(spec, 1, 2).unwrap().0.beta(1, 1)
    }

    fn collinear4(a: &CVec4, b: &CVec4) -> bool {
        (a.inner(b).norm() - 1.0).abs() < 1e-12
    }

    #[test]
    fn e4_second_factor_fixed_by_sampling() {
        let b = beta11(&SystemSpec::E4);
        let rep = product_directions(&b, &Tolerance::default()).unwrap();
        let ProductStructure::SecondFactorFixed { v } = rep.structure else { panic!("{rep:?}") };
        assert!(v.dist(&CVec2::e1()) < 1e-15);
        // sampling oracle: every image is a product with second factor ∥ v
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let d = CVec2::new(C64::new(rng.gen(), rng.gen()), C64::new(rng.gen(), rng.gen()));
            let w = b.apply(&d);
            assert!(reshape_det(&w).norm() < 1e-15);
            let (_, second) = product_factors(&w).unwrap();
            assert!(wedge(&second, &v) < 1e-12);
        }
    }

    #[test]
    fn e5_first_factor_fixed() {
        let rep = product_directions(&beta11(&SystemSpec::E5), &Tolerance::default()).unwrap();
        assert!(matches!(rep.structure, ProductStructure::FirstFactorFixed { .. }));
    }

    #[test]
    fn e1_generic_pair_is_xx_and_yy() {
        let a: f64 = 0.3;
        let (sys, basis) = generate_canonical(&SystemSpec::E1 { a }, 1, 2).unwrap();
        let rep = product_directions(sys.beta(1, 1), &Tolerance::default()).unwrap();
        let ProductStructure::GenericPair { dir1, dir2 } = rep.structure else { panic!("{rep:?}") };
        let xx = kron(basis.x(1), basis.x(1));
        let yy = kron(basis.y(1), basis.y(1));
        assert!((collinear4(&dir1, &xx) && collinear4(&dir2, &yy)) || (collinear4(&dir1, &yy) && collinear4(&dir2, &xx)));
    }

    #[test]
    fn e3_double_root_is_xx() {
        let rep = product_directions(&beta11(&SystemSpec::e3(C64::new(2.0, 0.0))), &Tolerance::default()).unwrap();
        let ProductStructure::DoubleRoot { dir } = rep.structure else { panic!("{rep:?}") };
        assert!(collinear4(&dir, &kron(&CVec2::e1(), &CVec2::e1())));
    }

    #[test]
    fn structure_survives_scrambling() {
        let tol = Tolerance::default();
        for seed in 0..20 {
            for spec in [SystemSpec::e3(C64::new(0.0, 1.0)), SystemSpec::E2 { a: 0.0 }, SystemSpec::E5] {
                let (sys, _) = generate_canonical(&spec, 1, 2).unwrap();
                let (scr, _) = scramble(&sys, seed).unwrap();
                let rep = product_directions(scr.beta(1, 1), &tol).unwrap();
                let ok = match (&spec, rep.structure) {
                    (SystemSpec::E3(_), ProductStructure::DoubleRoot { .. }) => true,
                    (SystemSpec::E2 { .. }, ProductStructure::GenericPair { .. }) => true,
                    (SystemSpec::E5, ProductStructure::FirstFactorFixed { .. }) => true,
                    _ => false,
                };
                assert!(ok, "{spec} seed {seed}: {rep:?}");
            }
        }
    }

    #[test]
    fn rejects_non_isometry() {
        let mut b = beta11(&SystemSpec::E4);
        b.cols[0] = b.cols[0].scale(C64::new(0.5, 0.0));
        assert!(matches!(product_directions(&b, &Tolerance::default()), Err(Error::NotIsometric { .. })));
    }
}
