//! Numerical check of `∫ Φ L*ξ dγ = c ξ(0)`, with `dγ = |x|^{τ+-μ1} dx`.
//!
//! In polar coordinates the weight collapses: `Φ r^{τ+-μ1} r^{N-1}` is `r`
//! (times `-ln r` at zero discriminant), because `τ- + τ+ - μ1 + N - 1 = 1`.
//! Both paths integrate `r` times the angular integral of `L*ξ` (times the
//! log in the critical case), which stays bounded at the origin.

use serde::{Deserialize, Serialize};

use super::adaptive::{integrate_interval, integrate_singular, QuadratureResult, QuadratureSpec};
use super::sphere::SphereRule;
use super::test_function::TestFunction;
use crate::error::{CknError, Result};
use crate::exponents::{exponent_data, OperatorParams, Regime};
use crate::operator::{adjoint_drift, apply_adjoint, fd_step};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdentityPath {
    /// One-dimensional reduction for radial `ξ` (any real `N`).
    Radial,
    /// Sphere × radius product quadrature (`N = 2, 3`).
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub lhs: f64,
    pub expected: f64,
    pub residual: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub path: IdentityPath,
}

/// Radial path for radial `ξ`, sphere path otherwise.
pub fn identity_residual(
    params: &OperatorParams,
    xi: &TestFunction,
    spec: &QuadratureSpec,
) -> Result<IdentityResidual> {
    let path = if xi.is_radial() {
        IdentityPath::Radial
    } else {
        IdentityPath::Sphere
    };
    identity_residual_with(params, xi, spec, path)
}

pub fn identity_residual_with(
    params: &OperatorParams,
    xi: &TestFunction,
    spec: &QuadratureSpec,
    path: IdentityPath,
) -> Result<IdentityResidual> {
    spec.validate()?;
    let data = exponent_data(params)?;
    let support = xi.support_radius();
    if !(support > 0.0 && support.is_finite()) {
        return Err(CknError::Domain(
            "test function needs a finite support".into(),
        ));
    }
    let log_weight = params.regime() == Regime::Critical;
    let drift = adjoint_drift(params)?;
    let origin = vec![0.0; xi.dim()];
    let expected = data.c_const * xi.value(&origin);
    // Accuracy is judged on the scale of c ξ(0), or of 1 when ξ(0) = 0.
    let spec = &spec.with_abs_tol(spec.abs_tol.max(spec.rel_tol * expected.abs().max(1.0)));

    let result = match path {
        IdentityPath::Radial => {
            let profile = xi
                .radial_profile()
                .ok_or_else(|| CknError::Domain("radial path needs a radial test function".into()))?
                .clone();
            let n = params.n();
            let area = data.sphere_area;
            // r·L*ξ(r) = -r ξ'' + (μ1 - 2τ+ - N + 1) ξ'
            let integrand = move |r: f64| {
                let h = fd_step(r).min(0.5 * r);
                let reduced = -r * profile.deriv2(r, h) + (drift - n + 1.0) * profile.deriv1(r, h);
                let w = if log_weight { -r.ln() } else { 1.0 };
                area * w * reduced
            };
            split_at_one(integrand, support, log_weight, spec)
        }
        IdentityPath::Sphere => {
            let dim = params
                .integer_dimension()
                .filter(|d| (2..=3).contains(d))
                .ok_or_else(|| {
                    CknError::Domain(format!(
                        "sphere quadrature needs N in {{2, 3}} (got {})",
                        params.n()
                    ))
                })?;
            if xi.dim() != dim {
                return Err(CknError::Domain(format!(
                    "test function lives in R^{} but N = {dim}",
                    xi.dim()
                )));
            }
            let rule = SphereRule::default_for(dim)?;
            let p = *params;
            let integrand = |r: f64| {
                let angular =
                    rule.integrate_at_radius(r, |x| apply_adjoint(&p, xi, x).unwrap_or(f64::NAN));
                let w = if log_weight { -r.ln() } else { 1.0 };
                r * w * angular
            };
            split_at_one(integrand, support, log_weight, spec)
        }
    };
    Ok(IdentityResidual {
        lhs: result.value,
        expected,
        residual: result.value - expected,
        error_estimate: result.error_estimate,
        evaluations: result.evaluations,
        converged: result.converged,
        path,
    })
}

/// `∫_0^R g`, with a breakpoint at `r = 1` where the log weight changes sign.
fn split_at_one<F: Fn(f64) -> f64>(
    g: F,
    support: f64,
    log_weight: bool,
    spec: &QuadratureSpec,
) -> QuadratureResult {
    if !log_weight || support <= 1.0 {
        return integrate_singular(&g, support, spec);
    }
    let inner = integrate_singular(&g, 1.0, spec);
    let outer = integrate_interval(&g, 1.0, support, spec);
    let value = inner.value + outer.value;
    let error = inner.error_estimate + outer.error_estimate;
    QuadratureResult {
        value,
        error_estimate: error,
        evaluations: inner.evaluations + outer.evaluations,
        converged: inner.converged
            && outer.converged
            && error <= (spec.rel_tol * value.abs()).max(spec.abs_tol),
    }
}
