#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Numerics for the degenerate operator `L = -Δ + μ1 x·∇/|x|² + μ2/|x|²`.

pub mod cli;
pub mod error;
pub mod exponents;
pub mod liouville;
pub mod operator;
pub mod output;
pub mod poisson;
pub mod profile;
pub mod quadrature;

pub use error::{CknError, Endpoint, Result};
