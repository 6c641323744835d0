//! The critical CKN inequality
//! `∫|x|^{-2a}|∇u|² ≥ ((N-2-2a)/2)² ∫|x|^{-2(a+1)} u²` on radial functions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::adaptive::{integrate_half_line, integrate_singular, QuadratureResult, QuadratureSpec};
use crate::error::{CknError, Endpoint, Result};
use crate::exponents::sphere_area;
use crate::profile::RadialProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CknCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// `((N-2-2a)/2)²`.
    pub constant: f64,
}

fn checked(res: (QuadratureResult, Option<QuadratureResult>), what: &str) -> Result<f64> {
    let (origin, infinity) = res;
    if !origin.converged || !origin.value.is_finite() {
        return Err(CknError::Divergent {
            endpoint: Endpoint::Origin,
            detail: format!("{what} integral: {origin:?}"),
        });
    }
    match infinity {
        Some(inf) if !inf.converged || !inf.value.is_finite() => Err(CknError::Divergent {
            endpoint: Endpoint::Infinity,
            detail: format!("{what} integral: {inf:?}"),
        }),
        Some(inf) => Ok(origin.value + inf.value),
        None => Ok(origin.value),
    }
}

fn radial_integral<F: Fn(f64) -> f64>(
    g: F,
    support: Option<f64>,
    spec: &QuadratureSpec,
) -> (QuadratureResult, Option<QuadratureResult>) {
    match support {
        Some(r) => (integrate_singular(g, r, spec), None),
        None => {
            let res = integrate_half_line(g, 1.0, spec);
            (res.origin, Some(res.infinity))
        }
    }
}

/// Both sides as radial integrals over `(0, support]` or `(0, ∞)`.
pub fn ckn_inequality_check(
    n: f64,
    a: f64,
    u: &RadialProfile,
    spec: &QuadratureSpec,
) -> Result<CknCheck> {
    spec.validate()?;
    if !(n >= 2.0) {
        return Err(CknError::Dimension(n));
    }
    if !(a < 0.5 * (n - 2.0)) {
        return Err(CknError::Domain(format!(
            "need a < (N-2)/2 = {} (got a = {a})",
            0.5 * (n - 2.0)
        )));
    }
    let area = sphere_area(n);
    let constant = (0.5 * (n - 2.0 - 2.0 * a)).powi(2);
    let support = u.support_radius();
    let grad = |r: f64| {
        let d = u.deriv1(r, 1e-4 * r);
        r.powf(n - 1.0 - 2.0 * a) * d * d
    };
    let mass = |r: f64| {
        let v = u.value(r);
        r.powf(n - 3.0 - 2.0 * a) * v * v
    };
    let lhs = area * checked(radial_integral(grad, support, spec), "gradient")?;
    let rhs = constant * area * checked(radial_integral(mass, support, spec), "weighted mass")?;
    Ok(CknCheck {
        lhs,
        rhs,
        ratio: lhs / rhs,
        constant,
    })
}

/// `r^α cos²(π ln r / (2L))` on `e^{-L} < r < e^{L}`, `α = -(N-2-2a)/2`.
///
/// Its ratio is `1 + π²/(3 L² α²)`, tending to 1 as the window widens.
pub fn near_extremal_profile(n: f64, a: f64, width: f64) -> RadialProfile {
    let alpha = -0.5 * (n - 2.0 - 2.0 * a);
    let k = PI / (2.0 * width);
    let inside = move |r: f64| r > 0.0 && r.ln().abs() < width;
    RadialProfile::new(move |r| {
        if inside(r) {
            r.powf(alpha) * (k * r.ln()).cos().powi(2)
        } else {
            0.0
        }
    })
    .with_deriv1(move |r| {
        if inside(r) {
            let s = k * r.ln();
            r.powf(alpha - 1.0) * (alpha * s.cos().powi(2) - k * (2.0 * s).sin())
        } else {
            0.0
        }
    })
}

/// Expected ratio of [`near_extremal_profile`].
pub fn near_extremal_ratio(n: f64, a: f64, width: f64) -> f64 {
    let alpha = -0.5 * (n - 2.0 - 2.0 * a);
    1.0 + PI * PI / (3.0 * width * width * alpha * alpha)
}

/// Ten radial functions with both integrals finite for `a < (N-2)/2`.
pub fn ckn_test_battery() -> Vec<(&'static str, RadialProfile)> {
    vec![
        (
            "gaussian",
            RadialProfile::new(|r| (-0.5 * r * r).exp()).with_deriv1(|r| -r * (-0.5 * r * r).exp()),
        ),
        (
            "lorentzian",
            RadialProfile::new(|r| 1.0 / (1.0 + r * r))
                .with_deriv1(|r| -2.0 * r / (1.0 + r * r).powi(2)),
        ),
        (
            "lorentzian_squared",
            RadialProfile::new(|r| (1.0 + r * r).powi(-2))
                .with_deriv1(|r| -4.0 * r * (1.0 + r * r).powi(-3)),
        ),
        (
            "exponential",
            RadialProfile::new(|r| (-r).exp()).with_deriv1(|r| -(-r).exp()),
        ),
        (
            "ring",
            RadialProfile::new(|r| r * r * (-r * r).exp())
                .with_deriv1(|r| (2.0 * r - 2.0 * r * r * r) * (-r * r).exp()),
        ),
        ("smooth_bump", RadialProfile::smooth_bump(1.0)),
        ("poly_bump", RadialProfile::poly_bump(2.0)),
        (
            "algebraic_tail",
            RadialProfile::new(|r| (1.0 + r).powi(-3)).with_deriv1(|r| -3.0 * (1.0 + r).powi(-4)),
        ),
        (
            "tilted_gaussian",
            RadialProfile::new(|r| (1.0 + r) * (-r * r).exp())
                .with_deriv1(|r| (1.0 - 2.0 * r - 2.0 * r * r) * (-r * r).exp()),
        ),
        (
            "wide_gaussian",
            RadialProfile::new(|r| (-r * r / 50.0).exp())
                .with_deriv1(|r| -r / 25.0 * (-r * r / 50.0).exp()),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_closed_form() {
        // N = 3, a = 0: lhs = 4π·3√π/8, rhs = π·√π/2, ratio 3.
        let u =
            RadialProfile::new(|r| (-0.5 * r * r).exp()).with_deriv1(|r| -r * (-0.5 * r * r).exp());
        let spec = QuadratureSpec::default();
        let c = ckn_inequality_check(3.0, 0.0, &u, &spec).unwrap();
        let sqrt_pi = PI.sqrt();
        assert!((c.lhs - 1.5 * PI * sqrt_pi).abs() < 1e-9 * c.lhs);
        assert!((c.rhs - 0.5 * PI * sqrt_pi).abs() < 1e-9 * c.rhs);
        assert!((c.ratio - 3.0).abs() < 1e-9);
    }

    #[test]
    fn lorentzian_closed_form() {
        // lhs = π²/2, rhs = π²/4.
        let battery = ckn_test_battery();
        let u = &battery[1].1;
        let c = ckn_inequality_check(3.0, 0.0, u, &QuadratureSpec::default()).unwrap();
        assert!((c.lhs - 0.5 * PI * PI).abs() < 1e-9 * c.lhs);
        assert!((c.ratio - 2.0).abs() < 1e-9);
    }

    #[test]
    fn near_extremal_matches_formula() {
        let spec = QuadratureSpec::default().with_max_levels(200);
        for (n, a, width) in [(3.0, 0.0, 30.0), (4.0, -0.5, 20.0)] {
            let u = near_extremal_profile(n, a, width);
            let c = ckn_inequality_check(n, a, &u, &spec).unwrap();
            let expected = near_extremal_ratio(n, a, width);
            assert!(
                (c.ratio - expected).abs() < 1e-7,
                "{} vs {expected}",
                c.ratio
            );
        }
    }

    #[test]
    fn errors() {
        let u = RadialProfile::new(|r| (-r).exp());
        let spec = QuadratureSpec::default();
        assert!(matches!(
            ckn_inequality_check(3.0, 0.5, &u, &spec),
            Err(CknError::Domain(_))
        ));
        let flat = RadialProfile::new(|_| 1.0).with_deriv1(|_| 0.0);
        let err = ckn_inequality_check(3.0, 0.0, &flat, &spec).unwrap_err();
        assert!(matches!(
            err,
            CknError::Divergent {
                endpoint: Endpoint::Infinity,
                ..
            }
        ));
    }
}
