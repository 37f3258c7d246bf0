//! Exact Kac-Peterson modular data for affine Kac-Moody algebras at
//! positive integer level, the fusion rules and closed-form Witten
//! invariants built from it, and machine checks of their Galois symmetry.
//!
//! All arithmetic lives in cyclotomic fields `Q(zeta_N)` and is exact; the
//! [`float`] module is a non-authoritative numerical mirror.

// Index loops read closer to the matrix formulas.
#![allow(clippy::needless_range_loop)]

pub mod cache;
pub mod cyclotomic;
pub mod error;
pub mod float;
pub mod fusion;
pub mod galois_action;
pub mod invariants;
pub mod modular_data;
pub mod relations;
pub mod rootsys;

pub use cyclotomic::CycNumber;
pub use error::{Error, Result};
pub use modular_data::{AffineWeight, ModularData};
pub use rootsys::{FiniteWeight, SimpleAlgebra};
