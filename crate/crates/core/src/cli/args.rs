use std::path::PathBuf;

use clap::{Parser, Subcommand};

use super::config::{Format, Grid, Overrides, RunConfig, TestFunctionKind};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Characteristic exponents, regime, critical exponents and Hardy reduction.
    Exponents,
    /// Φ and Γ at sample radii, with finite-difference checks of LΦ = LΓ = 0.
    Fundamental,
    /// Quadrature check of the weighted distributional identity.
    VerifyIdentity,
    /// Weighted Hardy (critical CKN) inequality on a battery of radial functions.
    CknCheck,
    /// Radial Poisson solve with the weighted L1 gate and singular-coefficient recovery.
    Poisson,
    /// Nonexistence certificate for Lu >= q0 |x|^theta u^p.
    Liouville,
    /// Liouville verdicts over a (mu1, mu2, p) grid, as CSV.
    Sweep,
}

/// Grid arguments accept `v`, `a,b,c` or `start:stop:count`.
#[derive(Debug, Clone, Parser)]
#[command(
    name = "cknkit",
    version,
    about = "Numerics for -Δ + μ1 x·∇/|x|² + μ2/|x|²"
)]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,

    /// Dimension.
    #[arg(long = "N", global = true, allow_negative_numbers = true)]
    pub n: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu1: Option<Grid>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mu2: Option<Grid>,
    /// Potential exponent θ in Q(x) >= q0 |x|^θ, also the source exponent of `poisson`.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p: Option<Grid>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub q0: Option<f64>,
    /// Radius of the ball (support of the test function, Poisson domain).
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// JSON file mirroring the run configuration; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; without it the report goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of json, csv.
    #[arg(long, global = true, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    /// Singular coefficient prescribed in `poisson`.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Weight exponent of `ckn-check` (default mu1/2).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// smooth-bump, poly-bump, tilted or annulus.
    #[arg(long, global = true)]
    pub test_function: Option<TestFunctionKind>,
}

impl Args {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            n: self.n,
            mu1: self.mu1.clone(),
            mu2: self.mu2.clone(),
            theta: self.theta,
            p: self.p.clone(),
            q0: self.q0,
            radius: self.radius,
            rel_tol: self.rel_tol,
            out: self.out.clone(),
            formats: self.format.clone(),
            k: self.k,
            a: self.a,
            test_function: self.test_function,
        }
    }

    pub fn config(&self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        Ok(base.apply(&self.overrides()))
    }
}
