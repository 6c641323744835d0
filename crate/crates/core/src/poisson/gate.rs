//! Is `f ∈ L¹(B_R, dγ)`, `dγ = |x|^{τ+-μ1} dx`?
//!
//! Radially this is `∫_0^R |f| r^{τ+-μ1+N-1} dr < ∞`. For `f ~ r^θ` the
//! integrand behaves like `r^{e-1}` with mass exponent `e = θ + τ+ - μ1 + N`.
//! The numeric side reads `e` off the decay of the contributions of the
//! dyadic-like shells `[Rρ^{k+1}, Rρ^k]`, which scale like `ρ^{ke}`.

use serde::{Deserialize, Serialize};

use super::source::SourceTerm;
use crate::error::{CknError, Result};
use crate::exponents::OperatorParams;
use crate::quadrature::{integrate_interval, integrate_singular, QuadratureSpec};

/// Numeric exponent estimates within this distance of 0 are left to the analytic test.
pub const GATE_MARGIN: f64 = 1e-6;
/// Shells used for the numeric exponent estimate.
const GATE_LEVELS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "decision")]
pub enum GateDecision {
    Integrable {
        value: f64,
        converged: bool,
        exponent: f64,
        numeric_exponent: f64,
    },
    Divergent {
        exponent: f64,
        numeric_exponent: f64,
    },
}

impl GateDecision {
    pub fn is_integrable(&self) -> bool {
        matches!(self, GateDecision::Integrable { .. })
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            GateDecision::Integrable { exponent, .. }
            | GateDecision::Divergent { exponent, .. } => exponent,
        }
    }

    pub fn numeric_exponent(&self) -> f64 {
        match *self {
            GateDecision::Integrable {
                numeric_exponent, ..
            }
            | GateDecision::Divergent {
                numeric_exponent, ..
            } => numeric_exponent,
        }
    }
}

/// `θ + τ+ - μ1 + N`; the source is integrable near 0 iff this is positive.
pub fn mass_exponent(params: &OperatorParams, theta: f64) -> Result<f64> {
    Ok(theta + params.tau_plus()? - params.mu1() + params.n())
}

/// Decay exponent of the shell masses, from the deepest pair of finite nonzero shells.
fn numeric_mass_exponent<F: Fn(f64) -> f64>(g: &F, radius: f64, spec: &QuadratureSpec) -> f64 {
    let rho = spec.cluster_ratio;
    let mut shells = Vec::with_capacity(GATE_LEVELS);
    let mut upper = radius;
    for _ in 0..GATE_LEVELS {
        let lower = upper * rho;
        let mass = integrate_interval(g, lower, upper, spec).value;
        if !mass.is_finite() {
            let overflow = mass == f64::INFINITY || g(lower) == f64::INFINITY;
            if !overflow {
                return f64::NAN;
            }
            // Shell masses blow up faster than f64 can follow.
            if shells.len() < 2 {
                return f64::NEG_INFINITY;
            }
            break;
        }
        shells.push(mass);
        upper = lower;
    }
    let last = shells.len() - 1;
    match (shells[last - 1], shells[last]) {
        (a, b) if a > 0.0 && b > 0.0 => (b / a).ln() / rho.ln(),
        (_, 0.0) => f64::INFINITY,
        _ => f64::NAN,
    }
}

pub fn weighted_l1_gate(
    params: &OperatorParams,
    f: &SourceTerm,
    radius: f64,
    spec: &QuadratureSpec,
) -> Result<GateDecision> {
    spec.validate()?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(CknError::Domain(format!(
            "radius {radius} must be positive"
        )));
    }
    let w = params.tau_plus()? - params.mu1() + params.n() - 1.0;
    let exponent = mass_exponent(params, f.theta_hint)?;
    let g = |r: f64| f.value(r).abs() * r.powf(w);
    let numeric_exponent = numeric_mass_exponent(&g, radius, spec);

    let analytic_says = exponent > 0.0;
    let numeric_says = if numeric_exponent > GATE_MARGIN {
        Some(true)
    } else if numeric_exponent < -GATE_MARGIN {
        Some(false)
    } else {
        None
    };
    if numeric_exponent.is_nan() || numeric_says.is_some_and(|n| n != analytic_says) {
        return Err(CknError::GateDisagreement {
            analytic: exponent,
            numeric: numeric_exponent,
        });
    }
    if !analytic_says {
        return Ok(GateDecision::Divergent {
            exponent,
            numeric_exponent,
        });
    }
    let mass = integrate_singular(g, radius, spec);
    Ok(GateDecision::Integrable {
        value: mass.value,
        converged: mass.converged,
        exponent,
        numeric_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::RadialProfile;

    fn params(n: f64, mu1: f64, mu2: f64) -> OperatorParams {
        OperatorParams::new(n, mu1, mu2).unwrap()
    }

    #[test]
    fn hardy_critical_threshold() {
        // τ+ = -1/2, so r^θ is integrable iff θ > -5/2.
        let p = params(3.0, 0.0, -0.25);
        let spec = QuadratureSpec::default();
        let d = weighted_l1_gate(&p, &SourceTerm::power(1.0, -2.7), 1.0, &spec).unwrap();
        assert!(!d.is_integrable());
        assert!((d.exponent() + 0.2).abs() < 1e-12);
        assert!((d.numeric_exponent() + 0.2).abs() < 1e-8);
        let d = weighted_l1_gate(&p, &SourceTerm::power(1.0, -2.3), 1.0, &spec).unwrap();
        match d {
            GateDecision::Integrable {
                value, converged, ..
            } => {
                // ∫_0^1 r^{-2.3} r^{1.5} dr = 1/0.2
                assert!(converged);
                assert!((value - 5.0).abs() < 1e-8);
            }
            _ => panic!("expected integrable"),
        }
    }

    #[test]
    fn constants_are_integrable() {
        let spec = QuadratureSpec::default();
        for (n, mu1, mu2) in [(3.0, 0.0, 0.0), (2.0, 0.0, 0.0), (5.0, 1.0, -0.5)] {
            let d = weighted_l1_gate(&params(n, mu1, mu2), &SourceTerm::constant(1.0), 0.5, &spec);
            assert!(d.unwrap().is_integrable());
        }
    }

    #[test]
    fn log_divergence_at_the_threshold() {
        let p = params(3.0, 0.5, -0.05);
        let theta = -p.tau_plus().unwrap() + p.mu1() - p.n();
        let d = weighted_l1_gate(
            &p,
            &SourceTerm::power(1.0, theta),
            1.0,
            &QuadratureSpec::default(),
        );
        assert!(!d.unwrap().is_integrable());
    }

    #[test]
    fn wrong_hint_is_caught() {
        let p = params(3.0, 0.0, 0.0);
        let f = SourceTerm::new(RadialProfile::power(-3.5), 0.0);
        let err = weighted_l1_gate(&p, &f, 1.0, &QuadratureSpec::default()).unwrap_err();
        assert!(matches!(err, CknError::GateDisagreement { .. }));
    }

    #[test]
    fn steep_divergence_overflows_cleanly() {
        let p = params(3.0, 0.0, -0.2);
        for theta in [-100.0, -900.0] {
            let d = weighted_l1_gate(
                &p,
                &SourceTerm::power(1.0, theta),
                1.0,
                &QuadratureSpec::default(),
            );
            assert!(!d.unwrap().is_integrable());
        }
    }

    #[test]
    fn vanishing_source() {
        let d = weighted_l1_gate(
            &params(3.0, 0.0, 0.0),
            &SourceTerm::zero(),
            1.0,
            &QuadratureSpec::default(),
        );
        match d.unwrap() {
            GateDecision::Integrable { value, .. } => assert_eq!(value, 0.0),
            _ => panic!(),
        }
    }
}
