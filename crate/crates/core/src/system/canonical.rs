use crate::error::{Error, Result};
use crate::num::{kron, CVec2, Isometry42, Mat2, Time};
use crate::rational::y_norm_law;
use crate::system::grid::{CanonicalBasis, FiniteGridSystem};
use crate::system::spec::{SystemSpec, TypeTag};
use crate::C64;

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `(x_t, y_t)` in the canonical frame at time `t`: `x_t = (1, 0)` and `y_t`
/// has a real nonnegative second coordinate.
fn canonical_pair(spec: &SystemSpec, t: Time) -> Result<(CVec2, CVec2)> {
    let tf = t.as_f64();
    let y = match spec {
        SystemSpec::E1 { a } | SystemSpec::E2 { a } => {
            if *a == 0.0 {
                CVec2::e2()
            } else {
                // a^{2t} can sit close to 1 for small t; 1 - a^{2t} = -expm1(2t ln a)
                let l = a.ln();
                CVec2::new(real((tf * l).exp()), real((-(2.0 * tf * l).exp_m1()).sqrt()))
            }
        }
        SystemSpec::E3(_) => {
            let c = spec.type3().expect("E3").c;
            CVec2::new(real(0.0), real(y_norm_law(c, t).sqrt()))
        }
        SystemSpec::E4 | SystemSpec::E5 => CVec2::e2(),
    };
    Ok((CVec2::e1(), y))
}

/// Build the canonical system of `spec` on the grid `{1/N, …, K/N}` together
/// with its canonical basis.
///
/// Parameters are read in time units: `⟨x_t, y_t⟩ = a^t` for `E1`/`E2`,
/// `λ_t = c^t η_t` and `‖y_t‖² = (c^{2t}-1)/(c²-1)` for `E3`. At `N = 1` a
/// discrete `E3(λ)` spec gives `‖y_j‖² = 1 + |λ|² + … + |λ|^{2j-2}`. The `E2`
/// parity refers to the grid index.
pub fn generate_canonical(spec: &SystemSpec, den: u64, horizon: u64) -> Result<(FiniteGridSystem, CanonicalBasis)> {
    spec.validate()?;
    let step = Time::new(1, den)?;
    if horizon < 2 {
        return Err(Error::HorizonTooSmall { horizon, needed: 2 });
    }
    let pairs = (1..=horizon)
        .map(|j| canonical_pair(spec, step.scale(j)?))
        .collect::<Result<Vec<_>>>()?;
    let basis = CanonicalBasis {
        step,
        x: pairs.iter().map(|p| p.0).collect(),
        y: pairs.iter().map(|p| p.1).collect(),
    };
    let inv_frames = (1..=horizon)
        .map(|j| basis.frame(j).inverse().ok_or_else(|| Error::InvalidSpec("degenerate canonical frame".into())))
        .collect::<Result<Vec<Mat2>>>()?;
    let type3 = spec.type3();

    let sys = FiniteGridSystem::from_fn(step, horizon, |j, k| {
        let (xs, ys, xt, yt) = (basis.x(j), basis.y(j), basis.x(k), basis.y(k));
        let (img_x, img_y) = match spec.type_tag() {
            TypeTag::E1 => (kron(xs, xt), kron(ys, yt)),
            TypeTag::E2 if j % 2 == 0 => (kron(xs, xt), kron(ys, yt)),
            TypeTag::E2 => (kron(xs, yt), kron(ys, xt)),
            TypeTag::E3 => {
                let l = type3.expect("E3").lambda_at(step.scale(j)?)?;
                (kron(xs, xt), kron(ys, xt).add(&kron(xs, yt).scale(l)))
            }
            TypeTag::E4 => (kron(xs, xt), kron(ys, xt)),
            TypeTag::E5 => (kron(xs, xt), kron(xs, yt)),
        };
        Ok(Isometry42::from_cols(img_x, img_y).compose_right(&inv_frames[(j + k - 1) as usize]))
    })?;
    Ok((sys, basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{check_isometry, CVec4};
    use crate::system::grid::condition_residual;

    fn r4(x: [f64; 4]) -> CVec4 {
        CVec4(x.map(real))
    }

    #[test]
    fn e1_zero_beta11() {
        let (sys, _) = generate_canonical(&SystemSpec::E1 { a: 0.0 }, 1, 2).unwrap();
        let b = sys.beta(1, 1);
        assert_eq!(b.cols[0], r4([1.0, 0.0, 0.0, 0.0]));
        assert_eq!(b.cols[1], r4([0.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn e3_lambda_two_beta11() {
        let (sys, basis) = generate_canonical(&SystemSpec::e3(real(2.0)), 1, 2).unwrap();
        let b = sys.beta(1, 1);
        let s = 5f64.sqrt();
        assert!(b.cols[0].dist(&r4([1.0, 0.0, 0.0, 0.0])) < 1e-15);
        assert!(b.cols[1].dist(&r4([0.0, 2.0 / s, 1.0 / s, 0.0])) < 1e-15);
        assert!((basis.y(2).norm_sqr() - 5.0).abs() < 1e-13);
        assert!(check_isometry(b) <= 1e-15);
    }

    #[test]
    fn e4_maps() {
        let (sys, basis) = generate_canonical(&SystemSpec::E4, 1, 3).unwrap();
        let b = sys.beta(1, 1);
        assert_eq!(b.cols[0], r4([1.0, 0.0, 0.0, 0.0]));
        assert_eq!(b.cols[1], r4([0.0, 0.0, 1.0, 0.0]));
        let img = sys.beta(1, 2).apply(basis.y(3));
        assert!(img.dist(&kron(basis.y(1), basis.x(2))) < 1e-15);
    }

    #[test]
    fn canonical_systems_satisfy_their_condition() {
        let specs = [
            SystemSpec::E1 { a: 0.3 },
            SystemSpec::E2 { a: 0.4 },
            SystemSpec::e3(C64::new(-0.5, 0.1)),
            SystemSpec::E4,
            SystemSpec::E5,
        ];
        for spec in specs {
            let (sys, basis) = generate_canonical(&spec, 1, 6).unwrap();
            assert!(sys.isometry_report().0 <= 1e-13, "{spec}");
            assert!(sys.check_associativity() <= 1e-12, "{spec}");
            let rep = condition_residual(&sys, &spec, &basis);
            assert!(rep.residual <= 1e-12, "{spec}: {rep:?}");
        }
    }

    #[test]
    fn e1_gram_data_on_products() {
        let a: f64 = 0.3;
        let (_, basis) = generate_canonical(&SystemSpec::E1 { a }, 1, 6).unwrap();
        for s in 1..=3u64 {
            for t in 1..=3u64 {
                let g = kron(basis.x(s), basis.x(t)).inner(&kron(basis.y(s), basis.y(t)));
                assert!((g - real(a.powi((s + t) as i32))).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn e3_norms_follow_geometric_law() {
        let lambda = C64::new(-0.5, 0.1);
        let (_, basis) = generate_canonical(&SystemSpec::e3(lambda), 1, 8).unwrap();
        let q = lambda.norm_sqr();
        for j in 1..=8 {
            let expect: f64 = (0..j).map(|k| q.powi(k)).sum();
            assert!((basis.y(j as u64).norm_sqr() - expect).abs() <= 1e-12);
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(generate_canonical(&SystemSpec::E1 { a: 1.2 }, 1, 4).is_err());
        assert!(generate_canonical(&SystemSpec::e3(real(0.0)), 1, 4).is_err());
        assert!(generate_canonical(&SystemSpec::e3_rational(-1.0, 0.0, vec![]), 1, 4).is_err());
        assert!(generate_canonical(&SystemSpec::E4, 1, 1).is_err());
    }
}
