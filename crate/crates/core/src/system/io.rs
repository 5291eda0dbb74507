//! JSON form of a grid system:
//! `{"denominator": N, "horizon": K, "maps": [{"s": j, "t": k, "matrix": [8 × [re, im]]}]}`
//! with each matrix stored column-major (4×2). A grid step `p/N` with `p > 1`
//! adds `"step_numerator": p`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{check_isometry, Isometry42, Time, Tolerance};
use crate::system::grid::{grid_pairs, FiniteGridSystem};
use crate::C64;

fn is_one(x: &u64) -> bool {
    *x == 1
}

fn one() -> u64 {
    1
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapEntry {
    s: u64,
    t: u64,
    matrix: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    denominator: u64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    step_numerator: u64,
    horizon: u64,
    maps: Vec<MapEntry>,
}

impl FiniteGridSystem {
    pub fn to_json_value(&self) -> serde_json::Value {
        let step = self.step();
        let file = SystemFile {
            denominator: step.den(),
            step_numerator: step.num(),
            horizon: self.horizon(),
            maps: self
                .maps()
                .map(|((s, t), m)| MapEntry { s, t, matrix: m.to_entries().to_vec() })
                .collect(),
        };
        serde_json::to_value(file).expect("system serialises")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("system serialises")
    }

    /// Parse and check schema, completeness, finiteness and isometry
    /// (against `tol.eps_structural`).
    pub fn from_json_value(value: serde_json::Value, tol: &Tolerance) -> Result<Self> {
        let file: SystemFile = serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))?;
        let step = Time::new(file.step_numerator, file.denominator)
            .map_err(|_| Error::Schema("denominator and step_numerator must be positive".into()))?;
        if step.num() != file.step_numerator {
            return Err(Error::Schema("step_numerator and denominator must be coprime".into()));
        }
        let horizon = file.horizon;
        if horizon < 2 {
            return Err(Error::HorizonTooSmall { horizon, needed: 2 });
        }
        let mut table = BTreeMap::new();
        for entry in file.maps {
            let (s, t) = (entry.s, entry.t);
            if s == 0 || t == 0 || s + t > horizon {
                return Err(Error::Schema(format!("pair ({s},{t}) outside horizon {horizon}")));
            }
            let entries: [C64; 8] = entry
                .matrix
                .try_into()
                .map_err(|v: Vec<C64>| Error::Schema(format!("matrix ({s},{t}) has {} entries, expected 8", v.len())))?;
            let m = Isometry42::from_entries(&entries);
            if !m.is_finite() {
                return Err(Error::Schema(format!("matrix ({s},{t}) has non-finite entries")));
            }
            let residual = check_isometry(&m);
            if residual > tol.eps_structural {
                return Err(Error::NotIsometric { s, t, residual });
            }
            if table.insert((s, t), m).is_some() {
                return Err(Error::Schema(format!("duplicate entry for ({s},{t})")));
            }
        }
        if let Some((s, t)) = grid_pairs(horizon).find(|p| !table.contains_key(p)) {
            return Err(Error::MissingMap { s, t });
        }
        FiniteGridSystem::from_fn(step, horizon, |s, t| Ok(table[&(s, t)]))
    }

    pub fn from_json_str(text: &str, tol: &Tolerance) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        FiniteGridSystem::from_json_value(value, tol)
    }
}

impl Serialize for FiniteGridSystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(serializer)
    }
}

pub fn save_system(sys: &FiniteGridSystem, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, sys.to_json_string() + "\n")?;
    Ok(())
}

pub fn load_system(path: impl AsRef<Path>, tol: &Tolerance) -> Result<FiniteGridSystem> {
    FiniteGridSystem::from_json_str(&fs::read_to_string(path)?, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::canonical::generate_canonical;
    use crate::system::scramble::scramble;
    use crate::system::spec::SystemSpec;
    use serde_json::json;

    #[test]
    fn save_load_is_bit_exact() {
        let (sys, _) = generate_canonical(&SystemSpec::e3(C64::new(-0.5, 0.1)), 3, 5).unwrap();
        let (sys, _) = scramble(&sys, 11).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        save_system(&sys, &path).unwrap();
        let back = load_system(&path, &Tolerance::default()).unwrap();
        for ((p, a), (q, b)) in sys.maps().zip(back.maps()) {
            assert_eq!(p, q);
            for (x, y) in a.to_entries().iter().zip(b.to_entries()) {
                assert_eq!(x.re.to_bits(), y.re.to_bits());
                assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
        assert_eq!(back.step(), sys.step());
    }

    fn entry(s: u64, t: u64, scale: f64) -> serde_json::Value {
        json!({"s": s, "t": t, "matrix": [
            [scale, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0],
            [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [scale, 0.0]
        ]})
    }

    #[test]
    fn rejects_short_columns() {
        let v = json!({"denominator": 1, "horizon": 2, "maps": [entry(1, 1, 0.5)]});
        let err = FiniteGridSystem::from_json_value(v, &Tolerance::default()).unwrap_err();
        assert!(matches!(err, Error::NotIsometric { s: 1, t: 1, .. }), "{err}");
    }

    #[test]
    fn rejects_missing_entries() {
        let v = json!({"denominator": 1, "horizon": 3, "maps": [entry(1, 1, 1.0), entry(2, 1, 1.0)]});
        let err = FiniteGridSystem::from_json_value(v, &Tolerance::default()).unwrap_err();
        assert!(matches!(err, Error::MissingMap { s: 1, t: 2 }), "{err}");
    }

    #[test]
    fn rejects_schema_violations() {
        let tol = Tolerance::default();
        let v = json!({"denominator": 1, "horizon": 2, "maps": [{"s": 1, "t": 1, "matrix": [[1.0, 0.0]]}]});
        assert!(matches!(FiniteGridSystem::from_json_value(v, &tol), Err(Error::Schema(_))));
        let v = json!({"denominator": 1, "horizon": 2, "maps": [entry(1, 1, 1.0), entry(1, 1, 1.0)]});
        assert!(matches!(FiniteGridSystem::from_json_value(v, &tol), Err(Error::Schema(_))));
        let v = json!({"denominator": 0, "horizon": 2, "maps": []});
        assert!(matches!(FiniteGridSystem::from_json_value(v, &tol), Err(Error::Schema(_))));
        let v = json!({"horizon": 2, "maps": []});
        assert!(matches!(FiniteGridSystem::from_json_value(v, &tol), Err(Error::Schema(_))));
    }
}
