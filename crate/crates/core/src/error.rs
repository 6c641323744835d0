use std::fmt;

use thiserror::Error;

/// Which end of a radial integration range misbehaved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Origin,
    Infinity,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Origin => f.write_str("origin"),
            Endpoint::Infinity => f.write_str("infinity"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CknError {
    #[error("dimension N = {0} is below 2")]
    Dimension(f64),

    #[error("no real exponents: discriminant {0:e} < 0 (Inadmissible)")]
    Inadmissible(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no Serrin-type exponent: tau_plus = {0} is not negative")]
    NoSerrinExponent(f64),

    #[error("divergent integral at the {endpoint}: {detail}")]
    Divergent { endpoint: Endpoint, detail: String },

    #[error(
        "weighted L1 gate disagreement: analytic exponent {analytic} vs numeric estimate {numeric} (bad theta_hint?)"
    )]
    GateDisagreement { analytic: f64, numeric: f64 },

    #[error(
        "source is not in L1(dγ) (mass exponent {exponent} <= 0): no nonnegative solution exists"
    )]
    NonIntegrableSource { exponent: f64 },

    #[error("no clean tau_minus asymptote: {0}")]
    NoAsymptote(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("below floating-point resolution: {0}")]
    Unresolved(String),

    #[error("quadrature did not converge: {0}")]
    NotConverged(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CknError {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            CknError::NotConverged(_) | CknError::NoAsymptote(_) | CknError::Unresolved(_) => 3,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for CknError {
    fn from(e: std::io::Error) -> Self {
        CknError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CknError>;
