use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::Time;
use crate::rational::tower::RefinementTower;
use crate::system::{wrap_signed, SystemSpec};
use crate::C64;

/// How the character was specified.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EtaDescriptor {
    /// `η_t = e^{ibt}`.
    Exponential { b: f64 },
    /// Non-principal roots taken at some refinement level.
    RootChoices { choices: Vec<u64> },
}

/// Character values `η_{k/N}`, `k = 1..=K`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaFamily {
    pub denominator: u64,
    pub values: Vec<C64>,
    pub descriptor: EtaDescriptor,
    /// `max |η_{j+k} − η_j η_k|` and `max ||η| − 1|` over the grid.
    pub multiplicativity_residual: f64,
}

impl EtaFamily {
    /// Sample the character of a rational `E3` spec on `{k/den : k ≤ points}`.
    pub fn from_spec(spec: &SystemSpec, den: u64, points: u64) -> Result<Self> {
        let view = spec.type3().ok_or_else(|| Error::NotType3(spec.to_string()))?;
        let values = (1..=points)
            .map(|k| view.eta(Time::new(k, den)?))
            .collect::<Result<Vec<_>>>()?;
        let descriptor = if view.is_exponential() {
            EtaDescriptor::Exponential { b: wrap_signed(view.b) }
        } else {
            EtaDescriptor::RootChoices { choices: view.choices.to_vec() }
        };
        let multiplicativity_residual = multiplicativity(&values);
        Ok(EtaFamily { denominator: den, values, descriptor, multiplicativity_residual })
    }

    /// `η_{k/N}`; `k = 0` gives 1.
    pub fn at(&self, k: u64) -> C64 {
        if k == 0 {
            C64::new(1.0, 0.0)
        } else {
            self.values[(k - 1) as usize]
        }
    }

    pub fn is_exponential(&self) -> bool {
        matches!(self.descriptor, EtaDescriptor::Exponential { .. })
    }
}

fn multiplicativity(values: &[C64]) -> f64 {
    let n = values.len();
    let mut worst = values.iter().map(|v| (v.norm() - 1.0).abs()).fold(0.0, f64::max);
    for j in 1..=n {
        for k in 1..=n - j {
            worst = worst.max((values[j + k - 1] - values[j - 1] * values[k - 1]).norm());
        }
    }
    worst
}

/// Character of an `E3` tower on its finest grid.
pub fn eta_from_tower(tower: &RefinementTower) -> Result<EtaFamily> {
    let finest = tower.finest();
    EtaFamily::from_spec(&tower.spec, finest.denominator, finest.system.horizon())
}
