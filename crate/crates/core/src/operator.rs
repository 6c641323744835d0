//! Fundamental solutions and the action of the operator on radial functions.
//!
//! On radial functions the operator reads `-u'' - (N-1-μ1) u'/r + μ2 u/r²`.
//! Powers and power-logs have closed forms; everything else is applied
//! pointwise, from analytic derivatives when the profile has them and from
//! centered differences otherwise.

use crate::error::{CknError, Result};
use crate::exponents::{indicial, OperatorParams, Regime};
use crate::profile::{RadialProfile, Smoothness};
use crate::quadrature::TestFunction;

/// Note attached to reports that rely on the power-log action.
pub const NOTE_POWER_LOG: &str =
    "power-log: L(r^tau(-ln r)) has plain coefficient +(2tau+N-2-mu1); only this sign vanishes at tau_zero";

fn regime_checked(params: &OperatorParams) -> Result<Regime> {
    match params.regime() {
        Regime::Inadmissible => Err(CknError::Inadmissible(params.discriminant())),
        r => Ok(r),
    }
}

fn positive_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(CknError::Domain(format!("radius {r} must be positive")))
    }
}

/// The singular fundamental solution: `r^{τ-}`, or `r^{τ0}(-ln r)` at zero
/// discriminant (positive only for `r < 1`).
pub fn phi(params: &OperatorParams, r: f64) -> Result<f64> {
    positive_radius(r)?;
    let (minus, _) = params.exponents()?;
    Ok(match regime_checked(params)? {
        Regime::Critical => -r.powf(minus) * r.ln(),
        _ => r.powf(minus),
    })
}

/// The regular homogeneous solution `r^{τ+}`.
pub fn gamma(params: &OperatorParams, r: f64) -> Result<f64> {
    positive_radius(r)?;
    let (_, plus) = params.exponents()?;
    Ok(r.powf(plus))
}

/// `Φ` as a profile with analytic derivatives.
pub fn phi_profile(params: &OperatorParams) -> Result<RadialProfile> {
    let (minus, _) = params.exponents()?;
    Ok(match regime_checked(params)? {
        Regime::Critical => RadialProfile::power_log(minus),
        _ => RadialProfile::power(minus),
    })
}

/// `Γ` as a profile with analytic derivatives.
pub fn gamma_profile(params: &OperatorParams) -> Result<RadialProfile> {
    Ok(RadialProfile::power(params.tau_plus()?))
}

/// `L r^τ = c(τ) r^{τ-2}`; returns `(c(τ), τ-2)`.
pub fn apply_power(params: &OperatorParams, tau: f64) -> (f64, f64) {
    (indicial(params, tau), tau - 2.0)
}

/// Closed form of `L(r^τ(-ln r)) = a r^{τ-2}(-ln r) + b r^{τ-2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLogAction {
    pub coeff_log: f64,
    pub coeff_plain: f64,
    pub exponent: f64,
}

pub fn apply_power_log(params: &OperatorParams, tau: f64) -> PowerLogAction {
    PowerLogAction {
        coeff_log: indicial(params, tau),
        coeff_plain: 2.0 * tau + params.n() - 2.0 - params.mu1(),
        exponent: tau - 2.0,
    }
}

/// Default difference step at radius `r`: `max(1e-5, 1e-4 r)`.
pub fn fd_step(r: f64) -> f64 {
    (1e-4 * r).max(1e-5)
}

/// Apply the operator pointwise to a radial profile at `r`.
pub fn apply_radial(params: &OperatorParams, profile: &RadialProfile, r: f64) -> Result<f64> {
    apply_radial_with_step(params, profile, r, fd_step(r))
}

/// As [`apply_radial`] with an explicit difference step (ignored when the
/// profile carries analytic derivatives).
pub fn apply_radial_with_step(
    params: &OperatorParams,
    profile: &RadialProfile,
    r: f64,
    h: f64,
) -> Result<f64> {
    positive_radius(r)?;
    if profile.smoothness() < Smoothness::C2 {
        return Err(CknError::Domain("operator needs a C2 profile".into()));
    }
    if let Some(limit) = profile.support_radius() {
        if r > limit {
            return Err(CknError::Domain(format!(
                "r = {r} outside the evaluable range (0, {limit}]"
            )));
        }
    }
    if !profile.has_derivatives() && r - h <= 0.0 {
        return Err(CknError::Domain(format!(
            "difference stencil at r = {r} with step {h} reaches the origin"
        )));
    }
    let u = profile.value(r);
    let d1 = profile.deriv1(r, h);
    let d2 = profile.deriv2(r, h);
    let drift = params.n() - 1.0 - params.mu1();
    Ok(-d2 - drift * d1 / r + params.mu2() * u / (r * r))
}

/// Drift coefficient `-2τ+ + μ1` of the weighted adjoint `L* = -Δ + (-2τ+ + μ1) x·∇/|x|²`.
pub fn adjoint_drift(params: &OperatorParams) -> Result<f64> {
    Ok(-2.0 * params.tau_plus()? + params.mu1())
}

/// `L*ξ(x)` at a point `x ≠ 0` of `R^N`.
pub fn apply_adjoint(params: &OperatorParams, xi: &TestFunction, x: &[f64]) -> Result<f64> {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 == 0.0 {
        return Err(CknError::Domain("adjoint is singular at x = 0".into()));
    }
    let drift = adjoint_drift(params)?;
    let grad = xi.gradient(x);
    let radial: f64 = x.iter().zip(&grad).map(|(a, b)| a * b).sum();
    Ok(-xi.laplacian(x) + drift * radial / r2)
}

/// Radial form of the adjoint: `-ξ'' - (N-1)ξ'/r + (-2τ+ + μ1) ξ'/r`.
pub fn apply_adjoint_radial(params: &OperatorParams, xi: &RadialProfile, r: f64) -> Result<f64> {
    positive_radius(r)?;
    let drift = adjoint_drift(params)?;
    let h = fd_step(r);
    let d1 = xi.deriv1(r, h);
    let d2 = xi.deriv2(r, h);
    Ok(-d2 - (params.n() - 1.0) * d1 / r + drift * d1 / r)
}

/// Empirical constant in `|L*ξ(x)| ≤ C (‖ξ‖_{C²} + ‖ξ‖_{C¹}/|x|)`: the largest
/// ratio over the sample radii. Norms are estimated on a dense radial grid.
pub fn adjoint_bound_check(
    params: &OperatorParams,
    xi: &RadialProfile,
    sample_radii: &[f64],
) -> Result<f64> {
    let support = xi.support_radius().unwrap_or(1.0);
    let grid: Vec<f64> = (1..=4000).map(|i| support * i as f64 / 4000.0).collect();
    let (mut c0, mut c1, mut c2) = (xi.value(0.0).abs(), 0.0f64, 0.0f64);
    for &r in grid.iter().chain(sample_radii) {
        let h = fd_step(r);
        let d1 = xi.deriv1(r, h);
        c0 = c0.max(xi.value(r).abs());
        c1 = c1.max(d1.abs());
        // Hessian eigenvalues of a radial function are u'' and u'/r.
        c2 = c2.max(xi.deriv2(r, h).abs()).max((d1 / r).abs());
    }
    let norm_c1 = c0 + c1;
    let norm_c2 = norm_c1 + c2;
    let mut worst = 0.0f64;
    for &r in sample_radii {
        let value = apply_adjoint_radial(params, xi, r)?.abs();
        let denom = norm_c2 + norm_c1 / r;
        if denom > 0.0 {
            worst = worst.max(value / denom);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn params(n: f64, mu1: f64, mu2: f64) -> OperatorParams {
        OperatorParams::new(n, mu1, mu2).unwrap()
    }

    #[test]
    fn fundamental_solution_values() {
        let p = params(3.0, 0.0, 0.0);
        assert_eq!(phi(&p, 0.5).unwrap(), 2.0);
        assert_eq!(gamma(&p, 0.5).unwrap(), 1.0);
        let p = params(2.0, 0.0, 0.0);
        assert!((phi(&p, 0.5).unwrap() - LN_2).abs() < 1e-15);
        let p = params(4.0, 2.0, 1.0);
        assert!((phi(&p, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((gamma(&p, 2.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn fundamental_solution_errors() {
        let p = params(3.0, 0.0, 0.0);
        assert!(matches!(phi(&p, 0.0), Err(CknError::Domain(_))));
        assert!(matches!(gamma(&p, -1.0), Err(CknError::Domain(_))));
        let bad = params(3.0, 1.0, -1.0);
        assert!(matches!(phi(&bad, 0.5), Err(CknError::Inadmissible(_))));
    }

    #[test]
    fn power_action() {
        let p = params(3.0, 0.0, 0.0);
        assert_eq!(apply_power(&p, 2.0), (-6.0, 0.0));
        let p = params(3.0, 0.0, -0.2);
        let plus = p.tau_plus().unwrap();
        let (c, e) = apply_power(&p, plus);
        assert!(c.abs() < 1e-15 && (e - (plus - 2.0)).abs() < 1e-15);
        let (c, e) = apply_power(&p, -0.5);
        assert!((c - 0.05).abs() < 1e-15);
        assert_eq!(e, -2.5);
    }

    #[test]
    fn power_log_action() {
        let a = apply_power_log(&params(2.0, 0.0, 0.0), 0.0);
        assert_eq!((a.coeff_log, a.coeff_plain, a.exponent), (0.0, 0.0, -2.0));
        let p = params(3.0, 0.0, 0.0);
        let a = apply_power_log(&p, -1.0);
        assert_eq!((a.coeff_log, a.coeff_plain, a.exponent), (0.0, -1.0, -3.0));
        let a = apply_power_log(&p, 0.0);
        assert_eq!((a.coeff_log, a.coeff_plain, a.exponent), (0.0, 1.0, -2.0));
    }

    #[test]
    fn power_log_coefficients_vanish_at_tau_zero() {
        for &(n, mu1) in &[(3.0, 0.0), (4.0, 0.5), (2.5, -1.2)] {
            let b: f64 = 2.0 - n + mu1;
            let p = params(n, mu1, -0.25 * b * b);
            let a = apply_power_log(&p, 0.5 * b);
            assert!(a.coeff_log.abs() < 1e-14 && a.coeff_plain.abs() < 1e-14);
        }
    }

    #[test]
    fn radial_application_examples() {
        let p = params(3.0, 0.0, -0.2);
        let gamma = RadialProfile::power(p.tau_plus().unwrap()).values_only();
        for r in [0.5, 1.0, 1.7] {
            assert!(apply_radial(&p, &gamma, r).unwrap().abs() < 1e-5);
        }
        let p = params(3.0, 0.0, 0.0);
        let sq = RadialProfile::new(|r| r * r);
        assert!((apply_radial(&p, &sq, 1.0).unwrap() + 6.0).abs() < 1e-6);
        let pl = RadialProfile::power_log(-1.0).values_only();
        assert!((apply_radial(&p, &pl, 0.5).unwrap() + 8.0).abs() < 1e-5);
        let analytic = RadialProfile::power_log(-1.0);
        assert!((apply_radial(&p, &analytic, 0.5).unwrap() + 8.0).abs() < 1e-12);
    }

    #[test]
    fn radial_application_domain_errors() {
        let p = params(3.0, 0.0, 0.0);
        let sq = RadialProfile::new(|r| r * r);
        assert!(apply_radial(&p, &sq, 0.0).is_err());
        assert!(apply_radial(&p, &sq, 1e-5).is_err());
        let limited = RadialProfile::new(|r| r).with_support(1.0);
        assert!(apply_radial(&p, &limited, 1.5).is_err());
        let rough = RadialProfile::new(|r| r).with_smoothness(Smoothness::C1);
        assert!(apply_radial(&p, &rough, 0.5).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let p = params(3.0, 0.0, 0.0);
        let sq = TestFunction::radial(RadialProfile::new(|r| r * r).with_support(10.0), 3);
        assert!((apply_adjoint(&p, &sq, &[0.3, -0.2, 0.5]).unwrap() + 6.0).abs() < 1e-5);
        let flat = TestFunction::radial(RadialProfile::new(|_| 2.0).with_support(10.0), 3);
        assert!(apply_adjoint(&p, &flat, &[0.3, 0.1, 0.0]).unwrap().abs() < 1e-6);
        assert!(apply_adjoint(&p, &flat, &[0.0, 0.0, 0.0]).is_err());

        let p = params(3.0, 0.0, -0.2);
        let sq = RadialProfile::power(2.0);
        let tp = p.tau_plus().unwrap();
        let expected = -2.0 - 4.0 - 2.0 * tp * 2.0;
        let got = apply_adjoint_radial(&p, &sq, 1.0).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got + 4.894).abs() < 1e-3);
        let via_point = apply_adjoint(&p, &TestFunction::radial(sq, 3), &[0.0, 1.0, 0.0]).unwrap();
        assert!((via_point - expected).abs() < 1e-12);
    }

    #[test]
    fn adjoint_bound_is_uniform() {
        let p = params(3.0, 0.0, -0.2);
        let bump = RadialProfile::smooth_bump(1.0);
        let zero = RadialProfile::new(|_| 0.0).with_support(1.0);
        assert_eq!(adjoint_bound_check(&p, &zero, &[0.1, 0.5]).unwrap(), 0.0);
        let mut previous = 0.0;
        for decades in 1..=4 {
            let samples: Vec<f64> = (0..=40 * decades)
                .map(|i| 10f64.powf(-(i as f64) / 40.0))
                .collect();
            let ratio = adjoint_bound_check(&p, &bump, &samples).unwrap();
            assert!(ratio.is_finite() && ratio > 0.0);
            if decades > 1 {
                assert!(
                    ratio <= previous * 1.05 + 1e-12,
                    "ratio grew: {previous} -> {ratio}"
                );
            }
            previous = ratio;
        }
        assert!(previous < 5.0);
    }
}
