//! Two-dimensional subproduct systems of Hilbert spaces.
//!
//! A subproduct system is a family of two-dimensional spaces `E_t` with
//! isometries `β_{s,t}: E_{s+t} → E_s ⊗ E_t` satisfying an associativity
//! diagram. Up to isomorphism there are five families (`E1(a)`, `E2(a)`,
//! `E3(λ)`, `E4`, `E5`). This crate builds them on finite rational grids,
//! classifies arbitrary concrete systems, computes automorphisms and
//! restrictions to sublattices, handles rational-time refinement towers, and
//! decides and constructs embeddings into the type I₁ Fock product system.

// `!(x <= tol)` is used on purpose so that NaN residuals fail checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod embed;
pub mod error;
pub mod morphisms;
pub mod num;
pub mod rational;
pub mod system;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
