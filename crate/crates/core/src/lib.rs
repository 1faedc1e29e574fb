//! Numerical laboratory for the Toda shock wave with steplike initial data.
//!
//! The pipeline evolves the lattice directly, computes scattering data of the initial
//! Jacobi operator, builds the genus-one finite-gap solution with the sector phases
//! Δ_j and compares both descriptions.

// Negated comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod finitegap;
pub mod harness;
pub mod io;
pub mod lattice;
pub mod phase;
pub mod quadrature;
pub mod scattering;
pub mod surface;
pub mod tridiag;

pub use error::{Error, Result};
