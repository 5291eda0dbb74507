use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::linalg::dist8;
use crate::num::{check_isometry, kron, CVec2, CVec4, Isometry42, Mat2, Time, Tolerance};
use crate::system::spec::{SystemSpec, TypeTag};
use crate::C64;

/// A subproduct system on the grid `step · {1, …, horizon}`.
///
/// Stores `β_{j,k}` (grid indices) for every pair with `j + k ≤ horizon`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGridSystem {
    step: Time,
    horizon: u64,
    maps: Vec<Isometry42>,
}

fn pair_index(horizon: u64, j: u64, k: u64) -> usize {
    ((j - 1) * horizon - (j - 1) * j / 2 + (k - 1)) as usize
}

/// All `(j, k)` with `j, k ≥ 1` and `j + k ≤ horizon`, in storage order.
pub fn grid_pairs(horizon: u64) -> impl Iterator<Item = (u64, u64)> {
    (1..horizon).flat_map(move |j| (1..=horizon - j).map(move |k| (j, k)))
}

/// All `(i, j, k)` with `i + j + k ≤ horizon`.
pub fn grid_triples(horizon: u64) -> impl Iterator<Item = (u64, u64, u64)> {
    grid_pairs(horizon).flat_map(move |(i, j)| (1..=horizon.saturating_sub(i + j)).map(move |k| (i, j, k)))
}

impl FiniteGridSystem {
    pub fn from_fn(
        step: Time,
        horizon: u64,
        mut f: impl FnMut(u64, u64) -> Result<Isometry42>,
    ) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::HorizonTooSmall { horizon, needed: 2 });
        }
        let maps = grid_pairs(horizon).map(|(j, k)| f(j, k)).collect::<Result<Vec<_>>>()?;
        Ok(FiniteGridSystem { step, horizon, maps })
    }

    pub fn step(&self) -> Time {
        self.step
    }

    /// `N` when the grid step is `1/N`.
    pub fn denominator(&self) -> Option<u64> {
        (self.step.num() == 1).then_some(self.step.den())
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// Time of grid index `j`.
    pub fn time(&self, j: u64) -> Time {
        self.step.scale(j).expect("grid index is positive")
    }

    /// Grid index of `t`, if `t` is on the grid and within the horizon.
    pub fn index_of(&self, t: Time) -> Option<u64> {
        t.index_on(self.step).filter(|&j| j >= 1 && j <= self.horizon)
    }

    /// `β_{j,k}` for grid indices; panics outside the stored range.
    pub fn beta(&self, j: u64, k: u64) -> &Isometry42 {
        assert!(j >= 1 && k >= 1 && j + k <= self.horizon, "pair ({j},{k}) outside horizon");
        &self.maps[pair_index(self.horizon, j, k)]
    }

    pub fn maps(&self) -> impl Iterator<Item = ((u64, u64), &Isometry42)> {
        grid_pairs(self.horizon).zip(&self.maps)
    }

    pub fn set_beta(&mut self, j: u64, k: u64, m: Isometry42) {
        let i = pair_index(self.horizon, j, k);
        self.maps[i] = m;
    }

    /// Largest isometry residual and the pair where it occurs.
    pub fn isometry_report(&self) -> (f64, Option<(u64, u64)>) {
        self.maps()
            .map(|(p, m)| (check_isometry(m), Some(p)))
            .fold((0.0, None), |acc, x| if x.0 > acc.0 { x } else { acc })
    }

    /// Largest associativity residual and the triple where it occurs.
    pub fn associativity_report(&self) -> (f64, Option<(u64, u64, u64)>) {
        let mut worst = (0.0, None);
        for (i, j, k) in grid_triples(self.horizon) {
            for u in [CVec2::e1(), CVec2::e2()] {
                let lhs = self.beta(i, j).apply_left_factor(&self.beta(i + j, k).apply(&u));
                let rhs = self.beta(j, k).apply_right_factor(&self.beta(i, j + k).apply(&u));
                let r = dist8(&lhs, &rhs);
                if r > worst.0 {
                    worst = (r, Some((i, j, k)));
                }
            }
        }
        worst
    }

    /// Max over admissible triples and basis vectors of
    /// `‖(β_{i,j}⊗I)β_{i+j,k}u − (I⊗β_{j,k})β_{i,j+k}u‖`.
    pub fn check_associativity(&self) -> f64 {
        self.associativity_report().0
    }

    /// Check isometry and associativity against `tol.eps_structural`.
    pub fn validate(&self, tol: &Tolerance) -> Result<ValidationReport> {
        let (iso, worst_pair) = self.isometry_report();
        if iso > tol.eps_structural {
            let (s, t) = worst_pair.expect("nonzero residual has a location");
            return Err(Error::NotIsometric { s, t, residual: iso });
        }
        let (assoc, worst_triple) = self.associativity_report();
        if assoc > tol.eps_structural {
            let (r, s, t) = worst_triple.expect("nonzero residual has a location");
            return Err(Error::NotAssociative { r, s, t, residual: assoc });
        }
        Ok(ValidationReport { isometry_residual: iso, associativity_residual: assoc })
    }

    /// `β'_{s,t} = (θ_s⊗θ_t) β_{s,t} θ_{s+t}^{-1}`; `thetas[j-1]` is `θ_j`.
    pub fn transport(&self, thetas: &[Mat2]) -> Result<FiniteGridSystem> {
        self.check_family_len(thetas)?;
        let inv = thetas
            .iter()
            .map(|t| t.inverse().ok_or_else(|| Error::Schema("singular theta".into())))
            .collect::<Result<Vec<_>>>()?;
        FiniteGridSystem::from_fn(self.step, self.horizon, |j, k| {
            Ok(self
                .beta(j, k)
                .compose_right(&inv[(j + k - 1) as usize])
                .compose_left(&thetas[(j - 1) as usize], &thetas[(k - 1) as usize]))
        })
    }

    pub(crate) fn check_family_len(&self, thetas: &[Mat2]) -> Result<()> {
        if thetas.len() as u64 != self.horizon {
            return Err(Error::Schema(format!(
                "family has {} matrices, horizon is {}",
                thetas.len(),
                self.horizon
            )));
        }
        Ok(())
    }

    /// Restriction to the sublattice of multiples of `m`.
    pub fn restrict(&self, m: u64) -> Result<FiniteGridSystem> {
        if m == 0 {
            return Err(Error::Schema("restriction factor must be positive".into()));
        }
        if self.horizon < 2 * m {
            return Err(Error::HorizonTooSmall { horizon: self.horizon, needed: 2 * m });
        }
        FiniteGridSystem::from_fn(self.step.scale(m)?, self.horizon / m, |j, k| Ok(*self.beta(m * j, m * k)))
    }

    /// Largest entrywise difference to another system on the same grid.
    pub fn max_map_diff(&self, other: &FiniteGridSystem) -> Result<f64> {
        if self.step != other.step || self.horizon != other.horizon {
            return Err(Error::GridMismatch);
        }
        Ok(self.maps.iter().zip(&other.maps).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub isometry_residual: f64,
    pub associativity_residual: f64,
}

/// Vectors `(x_t, y_t)` at every grid index, in the system's coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalBasis {
    pub step: Time,
    pub x: Vec<CVec2>,
    pub y: Vec<CVec2>,
}

impl CanonicalBasis {
    pub fn horizon(&self) -> u64 {
        self.x.len() as u64
    }

    pub fn x(&self, j: u64) -> &CVec2 {
        &self.x[(j - 1) as usize]
    }

    pub fn y(&self, j: u64) -> &CVec2 {
        &self.y[(j - 1) as usize]
    }

    /// Matrix with columns `x_j`, `y_j`.
    pub fn frame(&self, j: u64) -> Mat2 {
        Mat2::from_cols(self.x(j), self.y(j))
    }

    /// `(x_{mj}, y_{mj})_j` on the coarser grid.
    pub fn subsample(&self, m: u64) -> CanonicalBasis {
        let k = self.horizon() / m;
        CanonicalBasis {
            step: self.step.scale(m).expect("positive factor"),
            x: (1..=k).map(|j| *self.x(m * j)).collect(),
            y: (1..=k).map(|j| *self.y(m * j)).collect(),
        }
    }

    /// Divide every `y_j` by `k`.
    pub fn scale_y(&self, k: f64) -> CanonicalBasis {
        CanonicalBasis {
            step: self.step,
            x: self.x.clone(),
            y: self.y.iter().map(|v| v.scale(C64::new(1.0 / k, 0.0))).collect(),
        }
    }

    /// `(θ_j x_j, θ_j y_j)_j`.
    pub fn transform(&self, thetas: &[Mat2]) -> CanonicalBasis {
        CanonicalBasis {
            step: self.step,
            x: self.x.iter().zip(thetas).map(|(v, t)| t.apply(v)).collect(),
            y: self.y.iter().zip(thetas).map(|(v, t)| t.apply(v)).collect(),
        }
    }

    pub fn max_diff(&self, other: &CanonicalBasis) -> f64 {
        self.x
            .iter()
            .zip(&other.x)
            .chain(self.y.iter().zip(&other.y))
            .map(|(a, b)| a.dist(b))
            .fold(0.0, f64::max)
    }
}

/// Worst deviation of a basis from the condition of `spec` (grid units).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub residual: f64,
    pub worst_relation: String,
}

/// Check `basis` against the condition of `spec`, where `spec` is expressed
/// with one grid step as the time unit. `E3` requires `‖y_1‖ = 1`.
pub fn condition_residual(sys: &FiniteGridSystem, spec: &SystemSpec, basis: &CanonicalBasis) -> ConditionReport {
    let mut report = ConditionReport { residual: 0.0, worst_relation: String::new() };
    let mut note = |r: f64, what: &dyn Fn() -> String| {
        if r > report.residual || (report.worst_relation.is_empty() && r.is_nan()) {
            report.residual = r;
            report.worst_relation = what();
        }
    };
    let horizon = sys.horizon().min(basis.horizon());
    let tag = spec.type_tag();
    let lambda = spec.lambda();
    let a = spec.param_a();

    for j in 1..=horizon {
        let (x, y) = (basis.x(j), basis.y(j));
        note((x.norm() - 1.0).abs(), &|| format!("|x_{j}| = 1"));
        match tag {
            TypeTag::E1 | TypeTag::E2 => {
                note((y.norm() - 1.0).abs(), &|| format!("|y_{j}| = 1"));
                let target = a.unwrap().powi(j as i32);
                note((x.inner(y) - C64::new(target, 0.0)).norm(), &|| format!("<x_{j},y_{j}> = a^{j}"));
            }
            TypeTag::E3 => {
                note(x.inner(y).norm(), &|| format!("<x_{j},y_{j}> = 0"));
                if j == 1 {
                    note((y.norm() - 1.0).abs(), &|| "|y_1| = 1".to_string());
                }
            }
            TypeTag::E4 | TypeTag::E5 => {
                note((y.norm() - 1.0).abs(), &|| format!("|y_{j}| = 1"));
                note(x.inner(y).norm(), &|| format!("<x_{j},y_{j}> = 0"));
            }
        }
    }

    for (j, k) in grid_pairs(horizon) {
        let b = sys.beta(j, k);
        let (xs, ys, xt, yt) = (basis.x(j), basis.y(j), basis.x(k), basis.y(k));
        let (tx, ty): (CVec4, CVec4) = match tag {
            TypeTag::E1 => (kron(xs, xt), kron(ys, yt)),
            TypeTag::E2 if j % 2 == 0 => (kron(xs, xt), kron(ys, yt)),
            TypeTag::E2 => (kron(xs, yt), kron(ys, xt)),
            TypeTag::E3 => {
                let l = lambda.unwrap().powu(j as u32);
                (kron(xs, xt), kron(ys, xt).add(&kron(xs, yt).scale(l)))
            }
            TypeTag::E4 => (kron(xs, xt), kron(ys, xt)),
            TypeTag::E5 => (kron(xs, xt), kron(xs, yt)),
        };
        let jk = j + k;
        note(b.apply(basis.x(jk)).dist(&tx), &|| format!("beta({j},{k}) x_{jk}"));
        note(b.apply(basis.y(jk)).dist(&ty), &|| format!("beta({j},{k}) y_{jk}"));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_indexing_is_dense() {
        for horizon in 2..9 {
            let idx: Vec<usize> = grid_pairs(horizon).map(|(j, k)| pair_index(horizon, j, k)).collect();
            assert_eq!(idx, (0..idx.len()).collect::<Vec<_>>());
        }
        assert_eq!(grid_triples(2).count(), 0);
        assert_eq!(grid_triples(3).count(), 1);
    }
}
