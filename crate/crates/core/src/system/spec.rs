use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{phase, Time};
use crate::C64;

/// The five isomorphism families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeTag {
    E1,
    E2,
    E3,
    E4,
    E5,
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TypeTag::E1 => "E1",
            TypeTag::E2 => "E2",
            TypeTag::E3 => "E3",
            TypeTag::E4 => "E4",
            TypeTag::E5 => "E5",
        };
        f.write_str(s)
    }
}

/// Parameters of an `E3` system.
///
/// `Discrete { lambda }` describes `E3(λ)` with one grid step as the time
/// unit. `Rational { c, b, eta_choices }` describes a rational-time system
/// with `|λ_t| = c^t` and character `η`; `eta_choices[k-2]` selects which
/// `k`-th root is taken when passing from denominator `(k-1)!` to `k!`
/// (choice `0` keeps `η_t = e^{ibt}`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Type3Params {
    Discrete {
        lambda: C64,
    },
    Rational {
        c: f64,
        b: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        eta_choices: Vec<u64>,
    },
}

/// Symbolic description of a system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SystemSpec {
    E1 { a: f64 },
    E2 { a: f64 },
    E3(Type3Params),
    E4,
    E5,
}

/// Largest `n` for which `n!` denominators are supported.
pub const MAX_FACTORIAL_LEVEL: u64 = 20;

pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Smallest `n` with `den | n!`.
pub fn factorial_level(den: u64) -> Option<u64> {
    (1..=MAX_FACTORIAL_LEVEL).find(|&n| factorial(n).is_multiple_of(den))
}

impl SystemSpec {
    pub fn e3(lambda: C64) -> Self {
        SystemSpec::E3(Type3Params::Discrete { lambda })
    }

    pub fn e3_rational(c: f64, b: f64, eta_choices: Vec<u64>) -> Self {
        SystemSpec::E3(Type3Params::Rational { c, b, eta_choices })
    }

    pub fn type_tag(&self) -> TypeTag {
        match self {
            SystemSpec::E1 { .. } => TypeTag::E1,
            SystemSpec::E2 { .. } => TypeTag::E2,
            SystemSpec::E3(_) => TypeTag::E3,
            SystemSpec::E4 => TypeTag::E4,
            SystemSpec::E5 => TypeTag::E5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SystemSpec::E1 { a } | SystemSpec::E2 { a } => {
                if !(0.0..1.0).contains(a) {
                    return Err(Error::InvalidSpec(format!("a = {a} is outside [0, 1)")));
                }
            }
            SystemSpec::E3(Type3Params::Discrete { lambda }) => {
                if !lambda.is_finite() || lambda.norm() == 0.0 {
                    return Err(Error::InvalidSpec(format!("lambda = {lambda} must be finite and nonzero")));
                }
            }
            SystemSpec::E3(Type3Params::Rational { c, b, eta_choices }) => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::InvalidSpec(format!("c = {c} must be positive")));
                }
                if !b.is_finite() {
                    return Err(Error::InvalidSpec(format!("b = {b} must be finite")));
                }
                if eta_choices.len() as u64 > MAX_FACTORIAL_LEVEL - 1 {
                    return Err(Error::InvalidSpec("too many eta root choices".into()));
                }
                for (i, &r) in eta_choices.iter().enumerate() {
                    let level = i as u64 + 2;
                    if r >= level {
                        return Err(Error::InvalidSpec(format!(
                            "root choice {r} at level {level} must be below {level}"
                        )));
                    }
                }
            }
            SystemSpec::E4 | SystemSpec::E5 => {}
        }
        Ok(())
    }

    /// `a` for `E1`/`E2`.
    pub fn param_a(&self) -> Option<f64> {
        match self {
            SystemSpec::E1 { a } | SystemSpec::E2 { a } => Some(*a),
            _ => None,
        }
    }

    /// Rational-time view of `E3` parameters; `None` for other types.
    pub fn type3(&self) -> Option<Type3View<'_>> {
        match self {
            SystemSpec::E3(Type3Params::Discrete { lambda }) => {
                Some(Type3View { c: lambda.norm(), b: lambda.arg(), choices: &[] })
            }
            SystemSpec::E3(Type3Params::Rational { c, b, eta_choices }) => {
                Some(Type3View { c: *c, b: *b, choices: eta_choices })
            }
            _ => None,
        }
    }

    /// `λ` for a discrete `E3` spec, or `λ_1 = c e^{ib}` for a rational one.
    pub fn lambda(&self) -> Option<C64> {
        match self {
            SystemSpec::E3(Type3Params::Discrete { lambda }) => Some(*lambda),
            SystemSpec::E3(Type3Params::Rational { c, b, .. }) => Some(C64::from_polar(*c, *b)),
            _ => None,
        }
    }

    /// Type and parameters of the restriction to multiples of `m` (grid units).
    pub fn restricted(&self, m: u64) -> SystemSpec {
        let mi = m as i32;
        match self {
            SystemSpec::E1 { a } => SystemSpec::E1 { a: a.powi(mi) },
            SystemSpec::E2 { a } if m.is_multiple_of(2) => SystemSpec::E1 { a: a.powi(mi) },
            SystemSpec::E2 { a } => SystemSpec::E2 { a: a.powi(mi) },
            SystemSpec::E3(_) => SystemSpec::e3(self.lambda().expect("E3").powu(m as u32)),
            SystemSpec::E4 => SystemSpec::E4,
            SystemSpec::E5 => SystemSpec::E5,
        }
    }

    /// Compare type and parameters.
    pub fn approx_eq(&self, other: &SystemSpec, tol: f64) -> bool {
        if self.type_tag() != other.type_tag() {
            return false;
        }
        match self.type_tag() {
            TypeTag::E1 | TypeTag::E2 => (self.param_a().unwrap() - other.param_a().unwrap()).abs() <= tol,
            TypeTag::E3 => (self.lambda().unwrap() - other.lambda().unwrap()).norm() <= tol,
            TypeTag::E4 | TypeTag::E5 => true,
        }
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemSpec::E1 { a } => write!(f, "E1(a={a})"),
            SystemSpec::E2 { a } => write!(f, "E2(a={a})"),
            SystemSpec::E3(Type3Params::Discrete { lambda }) => {
                write!(f, "E3(lambda={}{:+}i)", lambda.re, lambda.im)
            }
            SystemSpec::E3(Type3Params::Rational { c, b, eta_choices }) => {
                write!(f, "E3(c={c}, b={b}")?;
                if !eta_choices.is_empty() {
                    write!(f, ", roots={eta_choices:?}")?;
                }
                write!(f, ")")
            }
            SystemSpec::E4 => write!(f, "E4"),
            SystemSpec::E5 => write!(f, "E5"),
        }
    }
}

/// Borrowed rational-time parameters of an `E3` spec.
#[derive(Clone, Copy, Debug)]
pub struct Type3View<'a> {
    pub c: f64,
    pub b: f64,
    pub choices: &'a [u64],
}

impl Type3View<'_> {
    /// `η_t`, exact in the integer part of the root bookkeeping.
    ///
    /// With `M_n = Σ_{k=2}^{n} (k-1)! r_k`, the level-`n` exponent is
    /// `b + 2π M_n`, so `η_t = e^{ibt} e^{2πi (M_n num mod den)/den}` for any
    /// `n` with `den | n!`.
    pub fn eta(&self, t: Time) -> Result<C64> {
        let den = t.den();
        factorial_level(den).ok_or_else(|| Error::OffGrid(format!("{t}: denominator exceeds 20!")))?;
        let d = den as u128;
        let mut m: u128 = 0;
        let mut fact: u128 = 1; // (k-1)! mod den
        for (i, &r) in self.choices.iter().enumerate() {
            let k = i as u128 + 2;
            fact = fact * (k - 1) % d;
            m = (m + fact * r as u128) % d;
        }
        let frac = (m * t.num() as u128 % d) as f64 / den as f64;
        Ok(phase(self.b * t.as_f64() + TAU * frac))
    }

    /// `λ_t = c^t η_t`.
    pub fn lambda_at(&self, t: Time) -> Result<C64> {
        Ok(self.eta(t)? * self.c.powf(t.as_f64()))
    }

    /// `true` when every root choice is the principal one.
    pub fn is_exponential(&self) -> bool {
        self.choices.iter().all(|&r| r == 0)
    }
}

/// Reduce an angle to `[0, 2π)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    if r >= TAU { 0.0 } else { r }
}

/// Reduce an angle to `(-π, π]`.
pub fn wrap_signed(phi: f64) -> f64 {
    let r = wrap_angle(phi);
    if r > PI { r - TAU } else { r }
}
