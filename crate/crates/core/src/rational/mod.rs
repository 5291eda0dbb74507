//! Rational-time systems: norm law, refinement of specs, factorial towers and
//! the `η` character of type `E3`.

pub mod eta;
pub mod norm;
pub mod refine;
pub mod tower;

pub use eta::{eta_from_tower, EtaDescriptor, EtaFamily};
pub use norm::{y_norm_law, y_norm_law_f64};
pub use refine::refine_spec;
pub use tower::{alternating_root_choices, build_tower, grid_spec, rational_form, RefinementTower, TowerLevel};
