//! Factorial refinement towers.
//!
//! Level `n` is the grid system on `{k/n! : 1 ≤ k ≤ H·n!}` where `H` is the
//! horizon in unit time. Every level is generated from one rational-time
//! description, so restricting level `n` by `n` reproduces level `n-1` map for
//! map, and the bases agree after subsampling.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::Time;
use crate::system::{
    factorial, generate_canonical, wrap_signed, CanonicalBasis, FiniteGridSystem, SystemSpec, Type3Params,
    MAX_FACTORIAL_LEVEL,
};

/// Largest number of grid points on one tower level.
pub const MAX_LEVEL_POINTS: u64 = 720;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TowerLevel {
    pub level: u64,
    pub denominator: u64,
    /// Type and parameters with one level step as the time unit.
    pub grid_spec: SystemSpec,
    pub system: FiniteGridSystem,
    /// Basis with `‖y_t‖²` following the rational-time norm law.
    pub basis: CanonicalBasis,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinementTower {
    /// Rational-time description shared by all levels.
    pub spec: SystemSpec,
    pub horizon: u64,
    pub levels: Vec<TowerLevel>,
    /// `compatibility[i]` compares level `i+2` restricted to level `i+1`.
    pub compatibility: Vec<f64>,
}

impl RefinementTower {
    pub fn root_choices(&self) -> &[u64] {
        match &self.spec {
            SystemSpec::E3(Type3Params::Rational { eta_choices, .. }) => eta_choices,
            _ => &[],
        }
    }

    pub fn finest(&self) -> &TowerLevel {
        self.levels.last().expect("towers are nonempty")
    }

    /// Coarsest level whose denominator is a multiple of `den`.
    pub fn level_for(&self, den: u64) -> Option<&TowerLevel> {
        self.levels.iter().find(|l| l.denominator % den == 0)
    }

    pub fn max_compatibility(&self) -> f64 {
        self.compatibility.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let levels: Vec<serde_json::Value> = self
            .levels
            .iter()
            .map(|l| {
                serde_json::json!({
                    "level": l.level,
                    "denominator": l.denominator,
                    "grid_spec": l.grid_spec,
                    "system": l.system.to_json_value(),
                    "basis": l.basis,
                })
            })
            .collect();
        serde_json::json!({
            "spec": self.spec,
            "horizon": self.horizon,
            "root_choices": self.root_choices(),
            "compatibility": self.compatibility,
            "levels": levels,
        })
    }
}

/// Rational-time form of a level-1 spec: discrete `E3(λ)` becomes
/// `c = |λ|`, `b = Arg λ` with the given root choices.
pub fn rational_form(spec: &SystemSpec, root_choices: &[u64]) -> Result<SystemSpec> {
    let out = match spec {
        SystemSpec::E3(Type3Params::Discrete { lambda }) => {
            SystemSpec::e3_rational(lambda.norm(), lambda.arg(), root_choices.to_vec())
        }
        SystemSpec::E3(Type3Params::Rational { c, b, eta_choices }) => {
            if !root_choices.is_empty() && !eta_choices.is_empty() && root_choices != eta_choices.as_slice() {
                return Err(Error::InvalidSpec("root choices given twice".into()));
            }
            let choices = if root_choices.is_empty() { eta_choices.clone() } else { root_choices.to_vec() };
            SystemSpec::e3_rational(*c, *b, choices)
        }
        _ if !root_choices.is_empty() => {
            return Err(Error::InvalidSpec("root choices only apply to E3".into()));
        }
        other => other.clone(),
    };
    out.validate()?;
    Ok(out)
}

/// Grid-unit spec at step `1/den` of a rational-time spec.
pub fn grid_spec(spec: &SystemSpec, den: u64) -> Result<SystemSpec> {
    let step = Time::new(1, den)?;
    Ok(match spec {
        SystemSpec::E1 { a } => SystemSpec::E1 { a: a.powf(step.as_f64()) },
        SystemSpec::E2 { a } => SystemSpec::E2 { a: a.powf(step.as_f64()) },
        SystemSpec::E3(_) => SystemSpec::e3(spec.type3().expect("E3").lambda_at(step)?),
        other => other.clone(),
    })
}

/// Build levels `1..=depth` with denominators `n!`; `horizon ≥ 2` is in unit time.
pub fn build_tower(spec: &SystemSpec, depth: u64, root_choices: &[u64], horizon: u64) -> Result<RefinementTower> {
    if depth == 0 || depth > MAX_FACTORIAL_LEVEL {
        return Err(Error::InvalidSpec(format!("depth {depth} outside 1..={MAX_FACTORIAL_LEVEL}")));
    }
    if matches!(spec, SystemSpec::E2 { .. }) && depth > 1 {
        return Err(Error::E2Refinement);
    }
    if horizon < 2 {
        return Err(Error::HorizonTooSmall { horizon, needed: 2 });
    }
    let spec = rational_form(spec, root_choices)?;
    let finest = factorial(depth).saturating_mul(horizon);
    if finest > MAX_LEVEL_POINTS {
        return Err(Error::InvalidSpec(format!(
            "finest level would hold {finest} grid points (limit {MAX_LEVEL_POINTS})"
        )));
    }

    let mut levels: Vec<TowerLevel> = Vec::new();
    let mut compatibility = Vec::new();
    for n in 1..=depth {
        let den = factorial(n);
        let k = horizon * den;
        let (system, basis) = generate_canonical(&spec, den, k)?;
        if let Some(prev) = levels.last() {
            compatibility.push(level_mismatch(&system, &basis, n, prev)?);
        }
        levels.push(TowerLevel { level: n, denominator: den, grid_spec: grid_spec(&spec, den)?, system, basis });
    }
    Ok(RefinementTower { spec, horizon, levels, compatibility })
}

fn level_mismatch(sys: &FiniteGridSystem, basis: &CanonicalBasis, n: u64, prev: &TowerLevel) -> Result<f64> {
    let restricted = sys.restrict(n)?;
    let maps = restricted.max_map_diff(&prev.system)?;
    let sub = basis.subsample(n);
    Ok(maps.max(sub.max_diff(&prev.basis)))
}

/// Root choices keeping `η_{1/n!}` as close to `-1` as possible at every
/// level `2..=depth`, for a character that is `1` at unit time.
pub fn alternating_root_choices(depth: u64) -> Vec<u64> {
    let mut choices = Vec::new();
    let mut angle = 0.0;
    for n in 2..=depth {
        let nf = n as f64;
        let r = (0..n)
            .min_by(|&p, &q| {
                let d = |r: u64| wrap_signed((angle + TAU * r as f64) / nf - PI).abs();
                d(p).total_cmp(&d(q))
            })
            .expect("n ≥ 2");
        angle = (angle + TAU * r as f64) / nf;
        choices.push(r);
    }
    choices
}
