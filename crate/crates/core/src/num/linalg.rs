//! Dense complex linear algebra on `C^2` and `C^2 ⊗ C^2`.
//!
//! Tensor coordinates are ordered `(e1⊗e1, e1⊗e2, e2⊗e1, e2⊗e2)`: the first
//! factor is the slow index. Inner products are linear in the first argument,
//! `<u, v> = Σ u_i conj(v_i)`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Unit-modulus complex number `e^{iφ}`.
pub fn phase(phi: f64) -> C64 {
    C64::from_polar(1.0, phi)
}

/// Two-tier tolerance: structural accept/reject decisions and residuals of
/// exactly constructed objects.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps_structural: f64,
    pub eps_verify: f64,
}

impl Tolerance {
    pub fn new(eps_structural: f64, eps_verify: f64) -> Result<Self> {
        if !(0.0 < eps_verify && eps_verify <= eps_structural && eps_structural < 1.0) {
            return Err(Error::InvalidTolerance { eps_structural, eps_verify });
        }
        Ok(Tolerance { eps_structural, eps_verify })
    }

    /// Override the structural tier, clamping the verify tier below it.
    pub fn with_structural(eps_structural: f64) -> Result<Self> {
        let d = Tolerance::default();
        Tolerance::new(eps_structural, d.eps_verify.min(eps_structural))
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps_structural: 1e-9, eps_verify: 1e-12 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CVec2(pub [C64; 2]);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CVec4(pub [C64; 4]);

fn dot<const N: usize>(u: &[C64; N], v: &[C64; N]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

macro_rules! vector_ops {
    ($t:ident, $n:expr) => {
        impl $t {
            pub fn zero() -> Self {
                $t([ZERO; $n])
            }

            pub fn inner(&self, other: &Self) -> C64 {
                dot(&self.0, &other.0)
            }

            pub fn norm_sqr(&self) -> f64 {
                self.0.iter().map(|z| z.norm_sqr()).sum()
            }

            pub fn norm(&self) -> f64 {
                self.norm_sqr().sqrt()
            }

            pub fn scale(&self, k: C64) -> Self {
                $t(self.0.map(|z| z * k))
            }

            pub fn add(&self, other: &Self) -> Self {
                let mut out = self.0;
                for (o, b) in out.iter_mut().zip(other.0) {
                    *o += b;
                }
                $t(out)
            }

            pub fn sub(&self, other: &Self) -> Self {
                self.add(&other.scale(-ONE))
            }

            pub fn dist(&self, other: &Self) -> f64 {
                self.sub(other).norm()
            }

            /// Unit vector in the same direction; `None` for (near) zero input.
            pub fn normalized(&self) -> Option<Self> {
                let n = self.norm();
                (n > 1e-300).then(|| self.scale(C64::new(1.0 / n, 0.0)))
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|z| z.is_finite())
            }
        }
    };
}

vector_ops!(CVec2, 2);
vector_ops!(CVec4, 4);

impl CVec2 {
    pub fn new(a: C64, b: C64) -> Self {
        CVec2([a, b])
    }

    pub fn e1() -> Self {
        CVec2([ONE, ZERO])
    }

    pub fn e2() -> Self {
        CVec2([ZERO, ONE])
    }

    /// The unit vector orthogonal to `self` with the fixed orientation
    /// `(-conj(v2), conj(v1))`; maps `e1` to `e2`.
    pub fn orthogonal(&self) -> CVec2 {
        CVec2([-self.0[1].conj(), self.0[0].conj()])
    }

    /// Multiply by the phase that makes the largest-modulus coordinate real
    /// and positive (ties go to the first coordinate).
    pub fn fix_phase(&self) -> CVec2 {
        let k = if self.0[1].norm() > self.0[0].norm() * (1.0 + 1e-9) { 1 } else { 0 };
        let z = self.0[k];
        if z.norm() == 0.0 {
            return *self;
        }
        self.scale(z.conj() / z.norm())
    }
}

/// Tensor product `u ⊗ v`; component `(i, j)` sits at index `2i + j`.
pub fn kron(u: &CVec2, v: &CVec2) -> CVec4 {
    CVec4([u.0[0] * v.0[0], u.0[0] * v.0[1], u.0[1] * v.0[0], u.0[1] * v.0[1]])
}

/// Exchange of tensor factors, `f ⊗ g ↦ g ⊗ f`.
pub fn exchange(w: &CVec4) -> CVec4 {
    CVec4([w.0[0], w.0[2], w.0[1], w.0[3]])
}

/// Determinant of the 2×2 reshape `M[i][j] = w_(i,j)`; zero iff `w` is a
/// product vector.
pub fn reshape_det(w: &CVec4) -> C64 {
    w.0[0] * w.0[3] - w.0[1] * w.0[2]
}

/// For a (near) product vector `w = u ⊗ v`, return unit factors `(u, v)`
/// read off the dominant row and column of the reshape.
pub fn product_factors(w: &CVec4) -> Option<(CVec2, CVec2)> {
    let rows = [CVec2([w.0[0], w.0[1]]), CVec2([w.0[2], w.0[3]])];
    let cols = [CVec2([w.0[0], w.0[2]]), CVec2([w.0[1], w.0[3]])];
    let row = if rows[1].norm() > rows[0].norm() { rows[1] } else { rows[0] };
    let col = if cols[1].norm() > cols[0].norm() { cols[1] } else { cols[0] };
    Some((col.normalized()?, row.normalized()?))
}

/// 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn scalar(z: C64) -> Self {
        Mat2([[z, ZERO], [ZERO, z]])
    }

    /// Matrix whose columns are `c0` and `c1`.
    pub fn from_cols(c0: &CVec2, c1: &CVec2) -> Self {
        Mat2([[c0.0[0], c1.0[0]], [c0.0[1], c1.0[1]]])
    }

    pub fn col(&self, k: usize) -> CVec2 {
        CVec2([self.0[0][k], self.0[1][k]])
    }

    pub fn apply(&self, v: &CVec2) -> CVec2 {
        let m = &self.0;
        CVec2([m[0][0] * v.0[0] + m[0][1] * v.0[1], m[1][0] * v.0[0] + m[1][1] * v.0[1]])
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        Mat2::from_cols(&self.apply(&other.col(0)), &self.apply(&other.col(1)))
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.norm() < 1e-300 {
            return None;
        }
        let m = &self.0;
        Some(Mat2([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]))
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                r = r.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        r
    }

    /// Max-norm of `m* m - I`.
    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&Mat2::identity())
    }

    /// `(self ⊗ other) w`.
    pub fn kron_apply(&self, other: &Mat2, w: &CVec4) -> CVec4 {
        let mut out = [ZERO; 4];
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = ZERO;
                for p in 0..2 {
                    for q in 0..2 {
                        acc += self.0[a][p] * other.0[b][q] * w.0[2 * p + q];
                    }
                }
                out[2 * a + b] = acc;
            }
        }
        CVec4(out)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }
}

/// Vector of `C^2 ⊗ C^2 ⊗ C^2`, index `4a + 2b + c`.
pub type CVec8 = [C64; 8];

pub fn dist8(u: &CVec8, v: &CVec8) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

/// A 4×2 complex matrix `C^2 → C^2 ⊗ C^2`, stored by columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry42 {
    pub cols: [CVec4; 2],
}

impl Isometry42 {
    pub fn from_cols(c0: CVec4, c1: CVec4) -> Self {
        Isometry42 { cols: [c0, c1] }
    }

    pub fn apply(&self, v: &CVec2) -> CVec4 {
        self.cols[0].scale(v.0[0]).add(&self.cols[1].scale(v.0[1]))
    }

    /// `m* w`.
    pub fn adjoint_apply(&self, w: &CVec4) -> CVec2 {
        CVec2([w.inner(&self.cols[0]), w.inner(&self.cols[1])])
    }

    /// `m · a` for a 2×2 matrix `a` acting on the domain.
    pub fn compose_right(&self, a: &Mat2) -> Isometry42 {
        Isometry42::from_cols(self.apply(&a.col(0)), self.apply(&a.col(1)))
    }

    /// `(l ⊗ r) · m`.
    pub fn compose_left(&self, l: &Mat2, r: &Mat2) -> Isometry42 {
        Isometry42::from_cols(l.kron_apply(r, &self.cols[0]), l.kron_apply(r, &self.cols[1]))
    }

    /// `(m ⊗ I) w` for `w` in `C^2 ⊗ C^2`.
    pub fn apply_left_factor(&self, w: &CVec4) -> CVec8 {
        let mut out = [ZERO; 8];
        for q in 0..2 {
            let v = CVec2([w.0[q], w.0[2 + q]]);
            let img = self.apply(&v);
            for ab in 0..4 {
                out[2 * ab + q] = img.0[ab];
            }
        }
        out
    }

    /// `(I ⊗ m) w` for `w` in `C^2 ⊗ C^2`.
    pub fn apply_right_factor(&self, w: &CVec4) -> CVec8 {
        let mut out = [ZERO; 8];
        for p in 0..2 {
            let v = CVec2([w.0[2 * p], w.0[2 * p + 1]]);
            let img = self.apply(&v);
            for bc in 0..4 {
                out[4 * p + bc] = img.0[bc];
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Isometry42) -> f64 {
        (0..2)
            .flat_map(|k| (0..4).map(move |i| (k, i)))
            .map(|(k, i)| (self.cols[k].0[i] - other.cols[k].0[i]).norm())
            .fold(0.0, f64::max)
    }

    /// Column-major entries (first column, then second).
    pub fn to_entries(&self) -> [C64; 8] {
        let mut out = [ZERO; 8];
        out[..4].copy_from_slice(&self.cols[0].0);
        out[4..].copy_from_slice(&self.cols[1].0);
        out
    }

    pub fn from_entries(e: &[C64; 8]) -> Self {
        Isometry42::from_cols(
            CVec4([e[0], e[1], e[2], e[3]]),
            CVec4([e[4], e[5], e[6], e[7]]),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.cols.iter().all(CVec4::is_finite)
    }
}

/// Max-norm of `m* m − I₂`.
pub fn check_isometry(m: &Isometry42) -> f64 {
    let g = [
        [m.cols[0].inner(&m.cols[0]), m.cols[1].inner(&m.cols[0])],
        [m.cols[0].inner(&m.cols[1]), m.cols[1].inner(&m.cols[1])],
    ];
    Mat2(g).max_abs_diff(&Mat2::identity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn v2(a: f64, b: f64) -> CVec2 {
        CVec2([c(a, 0.0), c(b, 0.0)])
    }

    fn v4(x: [f64; 4]) -> CVec4 {
        CVec4(x.map(|r| c(r, 0.0)))
    }

    #[test]
    fn kron_basis_cases() {
        assert_eq!(kron(&v2(1.0, 0.0), &v2(1.0, 0.0)), v4([1.0, 0.0, 0.0, 0.0]));
        assert_eq!(kron(&v2(0.0, 1.0), &v2(1.0, 0.0)), v4([0.0, 0.0, 1.0, 0.0]));
        assert_eq!(kron(&v2(1.0, 1.0), &v2(1.0, -1.0)), v4([1.0, -1.0, 1.0, -1.0]));
    }

    #[test]
    fn exchange_cases() {
        assert_eq!(exchange(&v4([0.0, 0.0, 1.0, 0.0])), v4([0.0, 1.0, 0.0, 0.0]));
        assert_eq!(exchange(&v4([1.0, 0.0, 0.0, 1.0])), v4([1.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn reshape_det_cases() {
        assert_eq!(reshape_det(&v4([1.0, 0.0, 0.0, 1.0])), ONE);
        let s = 5f64.sqrt();
        let d = reshape_det(&v4([0.0, 2.0 / s, 1.0 / s, 0.0]));
        assert!((d - c(-0.4, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn isometry_residuals() {
        let m = Isometry42::from_cols(v4([1.0, 0.0, 0.0, 0.0]), v4([0.0, 0.0, 0.0, 1.0]));
        assert_eq!(check_isometry(&m), 0.0);
        let m = Isometry42::from_cols(v4([1.0, 0.0, 0.0, 0.0]), v4([1.0, 0.0, 0.0, 0.0]));
        assert_eq!(check_isometry(&m), 1.0);
    }

    #[test]
    fn factor_actions_match_kron() {
        let m = Isometry42::from_cols(
            CVec4([c(0.5, 0.1), c(0.2, -0.3), c(0.0, 0.4), c(0.6, 0.0)]),
            CVec4([c(-0.1, 0.0), c(0.3, 0.3), c(0.5, 0.0), c(0.1, -0.2)]),
        );
        let u = CVec2([c(0.3, 0.2), c(-0.7, 0.1)]);
        let v = CVec2([c(0.9, -0.4), c(0.2, 0.5)]);
        let w = kron(&u, &v);
        let left = m.apply_left_factor(&w);
        let mu = m.apply(&u);
        for a in 0..4 {
            for q in 0..2 {
                assert!((left[2 * a + q] - mu.0[a] * v.0[q]).norm() < 1e-15);
            }
        }
        let right = m.apply_right_factor(&w);
        let mv = m.apply(&v);
        for p in 0..2 {
            for bc in 0..4 {
                assert!((right[4 * p + bc] - u.0[p] * mv.0[bc]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn product_factor_recovery() {
        let u = CVec2([c(0.6, 0.0), c(0.0, 0.8)]);
        let v = CVec2([c(0.0, 1.0), c(0.0, 0.0)]);
        let (a, b) = product_factors(&kron(&u, &v)).unwrap();
        assert!(kron(&a, &b).inner(&kron(&u, &v)).norm() > 1.0 - 1e-14);
    }

    #[test]
    fn tolerance_tiers() {
        assert!(Tolerance::new(1e-9, 1e-12).is_ok());
        assert!(Tolerance::new(1e-12, 1e-9).is_err());
        assert!(Tolerance::new(1.5, 1e-9).is_err());
        let t = Tolerance::with_structural(1e-14).unwrap();
        assert_eq!(t.eps_verify, 1e-14);
    }

    fn unit2() -> impl Strategy<Value = CVec2> {
        prop::array::uniform4(-1.0f64..1.0)
            .prop_filter("nonzero", |x| x.iter().map(|a| a * a).sum::<f64>() > 1e-3)
            .prop_map(|x| CVec2([c(x[0], x[1]), c(x[2], x[3])]).normalized().unwrap())
    }

    proptest! {
        #[test]
        fn products_have_zero_det(u in unit2(), v in unit2()) {
            prop_assert!(reshape_det(&kron(&u, &v)).norm() <= 1e-14);
        }

        #[test]
        fn tensor_inner_product_law(a in unit2(), b in unit2(), x in unit2(), y in unit2()) {
            let lhs = kron(&a, &b).inner(&kron(&x, &y));
            let rhs = a.inner(&x) * b.inner(&y);
            prop_assert!((lhs - rhs).norm() <= 1e-14);
        }

        #[test]
        fn exchange_is_isometric_involution(u in unit2(), v in unit2(), k in -2.0f64..2.0) {
            let w = kron(&u, &v).add(&kron(&v, &u).scale(c(k, 0.3)));
            prop_assert!((exchange(&w).norm() - w.norm()).abs() <= 1e-14);
            prop_assert_eq!(exchange(&exchange(&w)), w);
            prop_assert!(exchange(&kron(&u, &v)).dist(&kron(&v, &u)) <= 1e-15);
        }
    }
}
