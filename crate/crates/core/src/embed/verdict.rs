use serde::Serialize;

use crate::embed::represent::fock_amplitude;
use crate::error::{Error, Result};
use crate::rational::{rational_form, EtaFamily};
use crate::system::{wrap_signed, SystemSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Construction {
    /// Vacuum and a normalized exponential vector, `κ = 2 ln(1/a)`.
    TwoUnits { a: f64, kappa: f64 },
    /// Vacuum plus one-particle functions `A c^s e^{ibs}`.
    FockOneParticle { c: f64, b: f64, amplitude: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Obstruction {
    Type4,
    Type5,
    Type1WithAZero,
    Type3NonExponentialEta,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Verdict {
    Embeddable { construction: Construction },
    NotEmbeddable { reason: Obstruction },
}

impl Verdict {
    pub fn is_embeddable(&self) -> bool {
        matches!(self, Verdict::Embeddable { .. })
    }
}

/// Decide whether a rational-time system embeds into an Arveson system.
///
/// `E3` uses the descriptor of `eta` when given, else the root choices of
/// `spec`; a non-principal root choice counts as a declared non-exponential
/// character.
pub fn decide_embeddable(spec: &SystemSpec, eta: Option<&EtaFamily>) -> Result<Verdict> {
    let spec = rational_form(spec, &[])?;
    Ok(match &spec {
        SystemSpec::E2 { .. } => {
            return Err(Error::InvalidSpec("E2 is not a rational-time type".into()));
        }
        SystemSpec::E4 => Verdict::NotEmbeddable { reason: Obstruction::Type4 },
        SystemSpec::E5 => Verdict::NotEmbeddable { reason: Obstruction::Type5 },
        SystemSpec::E1 { a } if *a == 0.0 => Verdict::NotEmbeddable { reason: Obstruction::Type1WithAZero },
        SystemSpec::E1 { a } => Verdict::Embeddable { construction: Construction::TwoUnits { a: *a, kappa: -2.0 * a.ln() } },
        SystemSpec::E3(_) => {
            let view = spec.type3().expect("E3");
            let exponential = eta.map_or(view.is_exponential(), EtaFamily::is_exponential);
            if exponential {
                let b = match eta.map(|e| &e.descriptor) {
                    Some(crate::rational::EtaDescriptor::Exponential { b }) => *b,
                    _ => wrap_signed(view.b),
                };
                Verdict::Embeddable {
                    construction: Construction::FockOneParticle { c: view.c, b, amplitude: fock_amplitude(view.c) },
                }
            } else {
                Verdict::NotEmbeddable { reason: Obstruction::Type3NonExponentialEta }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn verdict_matrix() {
        assert!(decide_embeddable(&SystemSpec::E1 { a: 0.3 }, None).unwrap().is_embeddable());
        assert_eq!(
            decide_embeddable(&SystemSpec::E1 { a: 0.0 }, None).unwrap(),
            Verdict::NotEmbeddable { reason: Obstruction::Type1WithAZero }
        );
        assert_eq!(decide_embeddable(&SystemSpec::E5, None).unwrap(), Verdict::NotEmbeddable { reason: Obstruction::Type5 });
        assert_eq!(decide_embeddable(&SystemSpec::E4, None).unwrap(), Verdict::NotEmbeddable { reason: Obstruction::Type4 });
        let v = decide_embeddable(&SystemSpec::e3_rational(2.0, 1.0, vec![]), None).unwrap();
        assert!(matches!(v, Verdict::Embeddable { construction: Construction::FockOneParticle { c, b, .. } } if c == 2.0 && b == 1.0));
        assert!(decide_embeddable(&SystemSpec::e3(C64::new(0.0, 2.0)), None).unwrap().is_embeddable());
        assert_eq!(
            decide_embeddable(&SystemSpec::e3_rational(1.0, 0.0, vec![1]), None).unwrap(),
            Verdict::NotEmbeddable { reason: Obstruction::Type3NonExponentialEta }
        );
        assert!(decide_embeddable(&SystemSpec::E2 { a: 0.3 }, None).is_err());
    }

    #[test]
    fn eta_descriptor_overrides() {
        let spec = SystemSpec::e3_rational(1.0, 0.0, vec![]);
        let eta = EtaFamily::from_spec(&SystemSpec::e3_rational(1.0, 0.0, vec![1]), 2, 2).unwrap();
        assert!(!decide_embeddable(&spec, Some(&eta)).unwrap().is_embeddable());
    }
}
