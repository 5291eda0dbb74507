//! Concrete subproduct systems on finite rational grids.

pub mod canonical;
pub mod grid;
pub mod io;
pub mod scramble;
pub mod spec;

pub use canonical::generate_canonical;
pub use grid::{condition_residual, CanonicalBasis, ConditionReport, FiniteGridSystem, ValidationReport};
pub use io::{load_system, save_system};
pub use scramble::{random_unitary_family, scramble};
pub use spec::{
    factorial, factorial_level, wrap_angle, wrap_signed, SystemSpec, Type3Params, Type3View, TypeTag, MAX_FACTORIAL_LEVEL,
};
