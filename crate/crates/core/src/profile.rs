//! Radial functions `u(|x|)` with optional analytic derivatives.

use std::fmt;
use std::sync::Arc;

pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Smoothness {
    C0,
    C1,
    C2,
}

/// A radial function evaluable on `(0, support_radius]` (or `(0, ∞)` when
/// unbounded). Missing derivatives fall back to centered differences.
#[derive(Clone)]
pub struct RadialProfile {
    eval: RadialFn,
    deriv1: Option<RadialFn>,
    deriv2: Option<RadialFn>,
    support_radius: Option<f64>,
    smoothness: Smoothness,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("deriv1", &self.deriv1.is_some())
            .field("deriv2", &self.deriv2.is_some())
            .field("support_radius", &self.support_radius)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl RadialProfile {
    pub fn new(eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
            deriv1: None,
            deriv2: None,
            support_radius: None,
            smoothness: Smoothness::C2,
        }
    }

    pub fn with_deriv1(mut self, d1: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.deriv1 = Some(Arc::new(d1));
        self
    }

    pub fn with_deriv2(mut self, d2: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.deriv2 = Some(Arc::new(d2));
        self
    }

    pub fn with_support(mut self, radius: f64) -> Self {
        self.support_radius = Some(radius);
        self
    }

    pub fn with_smoothness(mut self, smoothness: Smoothness) -> Self {
        self.smoothness = smoothness;
        self
    }

    /// Drop analytic derivatives so that consumers difference the values.
    pub fn values_only(&self) -> Self {
        Self {
            deriv1: None,
            deriv2: None,
            ..self.clone()
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        (self.eval)(r)
    }

    pub fn analytic_deriv1(&self, r: f64) -> Option<f64> {
        self.deriv1.as_ref().map(|d| d(r))
    }

    pub fn analytic_deriv2(&self, r: f64) -> Option<f64> {
        self.deriv2.as_ref().map(|d| d(r))
    }

    pub fn has_derivatives(&self) -> bool {
        self.deriv1.is_some() && self.deriv2.is_some()
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    /// `u'(r)`, analytic if available, otherwise a centered difference with step `h`.
    pub fn deriv1(&self, r: f64, h: f64) -> f64 {
        match &self.deriv1 {
            Some(d) => d(r),
            None => (self.value(r + h) - self.value(r - h)) / (2.0 * h),
        }
    }

    /// `u''(r)`, analytic if available, otherwise a centered difference with step `h`.
    pub fn deriv2(&self, r: f64, h: f64) -> f64 {
        match &self.deriv2 {
            Some(d) => d(r),
            None => (self.value(r + h) - 2.0 * self.value(r) + self.value(r - h)) / (h * h),
        }
    }

    /// `r^τ`.
    pub fn power(tau: f64) -> Self {
        Self::new(move |r| r.powf(tau))
            .with_deriv1(move |r| tau * r.powf(tau - 1.0))
            .with_deriv2(move |r| tau * (tau - 1.0) * r.powf(tau - 2.0))
    }

    /// `r^τ (-ln r)`.
    pub fn power_log(tau: f64) -> Self {
        Self::new(move |r| -r.powf(tau) * r.ln())
            .with_deriv1(move |r| r.powf(tau - 1.0) * (-tau * r.ln() - 1.0))
            .with_deriv2(move |r| {
                r.powf(tau - 2.0) * (-tau * (tau - 1.0) * r.ln() - (2.0 * tau - 1.0))
            })
    }

    /// `exp(1 - 1/(1 - (r/R)²))` on `r < R`, zero beyond; equals 1 at the origin.
    pub fn smooth_bump(radius: f64) -> Self {
        let value = move |r: f64| {
            let s = r / radius;
            if s >= 1.0 {
                0.0
            } else {
                (1.0 - 1.0 / (1.0 - s * s)).exp()
            }
        };
        Self::new(value)
            .with_deriv1(move |r| {
                let s = r / radius;
                if s >= 1.0 {
                    return 0.0;
                }
                let w = 1.0 - s * s;
                let b = (1.0 - 1.0 / w).exp();
                b * (-2.0 * s / (w * w)) / radius
            })
            .with_deriv2(move |r| {
                let s = r / radius;
                if s >= 1.0 {
                    return 0.0;
                }
                let w = 1.0 - s * s;
                let b = (1.0 - 1.0 / w).exp();
                if b == 0.0 {
                    return 0.0;
                }
                let g1 = -2.0 * s / (w * w);
                let g2 = -2.0 / (w * w) - 8.0 * s * s / (w * w * w);
                b * (g1 * g1 + g2) / (radius * radius)
            })
            .with_support(radius)
    }

    /// `(1 - (r/R)²)³` on `r < R`, zero beyond: a C² bump that is polynomial inside.
    pub fn poly_bump(radius: f64) -> Self {
        Self::new(move |r| {
            let w = 1.0 - (r / radius).powi(2);
            if w <= 0.0 {
                0.0
            } else {
                w.powi(3)
            }
        })
        .with_deriv1(move |r| {
            let w = 1.0 - (r / radius).powi(2);
            if w <= 0.0 {
                0.0
            } else {
                -6.0 * r / (radius * radius) * w * w
            }
        })
        .with_deriv2(move |r| {
            let s2 = (r / radius).powi(2);
            let w = 1.0 - s2;
            if w <= 0.0 {
                0.0
            } else {
                (-6.0 * w * w + 24.0 * s2 * w) / (radius * radius)
            }
        })
        .with_support(radius)
    }

    /// `a·f + b·g`; the support is the larger one, derivatives kept when both have them.
    pub fn linear_combination(a: f64, f: &RadialProfile, b: f64, g: &RadialProfile) -> Self {
        let (fe, ge) = (f.eval.clone(), g.eval.clone());
        let mut out = Self::new(move |r| a * fe(r) + b * ge(r));
        if let (Some(f1), Some(g1)) = (f.deriv1.clone(), g.deriv1.clone()) {
            out = out.with_deriv1(move |r| a * f1(r) + b * g1(r));
        }
        if let (Some(f2), Some(g2)) = (f.deriv2.clone(), g.deriv2.clone()) {
            out = out.with_deriv2(move |r| a * f2(r) + b * g2(r));
        }
        out.support_radius = match (f.support_radius, g.support_radius) {
            (Some(x), Some(y)) => Some(x.max(y)),
            _ => None,
        };
        out.smoothness = f.smoothness.min(g.smoothness);
        out
    }

    pub fn scaled(&self, a: f64) -> Self {
        let fe = self.eval.clone();
        let mut out = Self::new(move |r| a * fe(r));
        if let Some(f1) = self.deriv1.clone() {
            out = out.with_deriv1(move |r| a * f1(r));
        }
        if let Some(f2) = self.deriv2.clone() {
            out = out.with_deriv2(move |r| a * f2(r));
        }
        out.support_radius = self.support_radius;
        out.smoothness = self.smoothness;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_keeps_infinities() {
        assert_eq!(
            RadialProfile::power(-400.0).scaled(2.0).value(0.1),
            f64::INFINITY
        );
    }

    fn check_derivatives(p: &RadialProfile, radii: &[f64], tol: f64) {
        for &r in radii {
            let h = 1e-5 * r.max(1e-3);
            let fd1 = (p.value(r + h) - p.value(r - h)) / (2.0 * h);
            let fd2 = (p.value(r + h) - 2.0 * p.value(r) + p.value(r - h)) / (h * h);
            let d1 = p.analytic_deriv1(r).unwrap();
            let d2 = p.analytic_deriv2(r).unwrap();
            assert!(
                (fd1 - d1).abs() < tol * (1.0 + d1.abs()),
                "d1 at {r}: {fd1} vs {d1}"
            );
            assert!(
                (fd2 - d2).abs() < 1e3 * tol * (1.0 + d2.abs()),
                "d2 at {r}: {fd2} vs {d2}"
            );
        }
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let radii = [0.1, 0.35, 0.5, 0.8, 0.95];
        check_derivatives(&RadialProfile::power(-0.7), &radii, 1e-6);
        check_derivatives(&RadialProfile::power_log(-1.0), &radii, 1e-6);
        check_derivatives(&RadialProfile::smooth_bump(1.0), &radii, 1e-6);
        check_derivatives(&RadialProfile::poly_bump(1.0), &radii, 1e-6);
    }

    #[test]
    fn bumps_vanish_outside_support() {
        for p in [
            RadialProfile::smooth_bump(0.8),
            RadialProfile::poly_bump(0.8),
        ] {
            assert_eq!(p.value(0.8), 0.0);
            assert_eq!(p.value(2.0), 0.0);
            assert_eq!(p.analytic_deriv1(0.9), Some(0.0));
            assert!((p.value(0.0) - 1.0).abs() < 1e-15);
            assert_eq!(p.analytic_deriv1(0.0), Some(0.0));
            assert_eq!(p.support_radius(), Some(0.8));
        }
    }

    #[test]
    fn combination_is_pointwise() {
        let f = RadialProfile::power(2.0);
        let g = RadialProfile::poly_bump(1.0);
        let h = RadialProfile::linear_combination(2.0, &f, -3.0, &g);
        for r in [0.2, 0.6] {
            assert!((h.value(r) - (2.0 * f.value(r) - 3.0 * g.value(r))).abs() < 1e-15);
            let d2 = 2.0 * f.analytic_deriv2(r).unwrap() - 3.0 * g.analytic_deriv2(r).unwrap();
            assert!((h.analytic_deriv2(r).unwrap() - d2).abs() < 1e-14);
        }
        assert!(h.values_only().analytic_deriv1(0.3).is_none());
    }
}
