//! Exact time and small dense complex linear algebra.

pub mod linalg;
pub mod time;

pub use linalg::{
    check_isometry, exchange, kron, phase, product_factors, reshape_det, CVec2, CVec4, Isometry42,
    Mat2, Tolerance, ONE, ZERO,
};
pub use time::Time;
