//! Mix & Match Hamiltonian Monte Carlo: splitting integrators, modified Hamiltonians,
//! importance-weighted samplers and their diagnostics.

// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod integrators;
pub mod model;
pub mod models;
pub mod samplers;
pub mod shadow;

pub use error::{Error, Result};
