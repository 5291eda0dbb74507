use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::system::SystemSpec;
use crate::C64;

/// A spec whose restriction to multiples of `m` is `spec` (grid units).
///
/// `E1(a)` takes the positive root, `E3(λ)` the root
/// `|λ|^{1/m} e^{i(Arg λ + 2π r)/m}` with `r = root_choice` and the principal
/// argument, and `E4`/`E5` are fixed. `E2` has no preimage for `m ≥ 2`.
pub fn refine_spec(spec: &SystemSpec, m: u64, root_choice: u64) -> Result<SystemSpec> {
    spec.validate()?;
    if m == 0 {
        return Err(Error::InvalidSpec("refinement factor must be positive".into()));
    }
    if m == 1 {
        return Ok(spec.clone());
    }
    let mf = m as f64;
    match spec {
        SystemSpec::E1 { a } => Ok(SystemSpec::E1 { a: a.powf(1.0 / mf) }),
        SystemSpec::E2 { .. } => Err(Error::E2Refinement),
        SystemSpec::E3(_) => {
            if root_choice >= m {
                return Err(Error::InvalidSpec(format!("root choice {root_choice} must be below {m}")));
            }
            let l = spec.lambda().expect("E3");
            let angle = (l.arg() + TAU * root_choice as f64) / mf;
            Ok(SystemSpec::e3(C64::from_polar(l.norm().powf(1.0 / mf), angle)))
        }
        SystemSpec::E4 | SystemSpec::E5 => Ok(spec.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let r = refine_spec(&SystemSpec::E1 { a: 0.25 }, 2, 0).unwrap();
        assert!(r.approx_eq(&SystemSpec::E1 { a: 0.5 }, 1e-15));
        let r = refine_spec(&SystemSpec::e3(C64::new(4.0, 0.0)), 2, 1).unwrap();
        assert!((r.lambda().unwrap() - C64::new(-2.0, 0.0)).norm() < 1e-15);
        assert!(matches!(refine_spec(&SystemSpec::E2 { a: 0.3 }, 2, 0), Err(Error::E2Refinement)));
        assert!(refine_spec(&SystemSpec::e3(C64::new(4.0, 0.0)), 2, 2).is_err());
    }

    #[test]
    fn every_root_restricts_back() {
        let l = C64::new(-0.5, 0.1);
        for m in 2..=4 {
            for r in 0..m {
                let up = refine_spec(&SystemSpec::e3(l), m, r).unwrap();
                assert!(up.restricted(m).approx_eq(&SystemSpec::e3(l), 1e-14), "m={m} r={r}");
            }
        }
    }
}
