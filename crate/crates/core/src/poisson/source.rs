use crate::profile::RadialProfile;

/// A radial right-hand side `f(r) ~ r^θ h(r)` near the origin, `h` bounded.
///
/// `theta_hint` is `+∞` for sources vanishing near 0.
#[derive(Debug, Clone)]
pub struct SourceTerm {
    pub profile: RadialProfile,
    pub theta_hint: f64,
}

impl SourceTerm {
    pub fn new(profile: RadialProfile, theta_hint: f64) -> Self {
        Self {
            profile,
            theta_hint,
        }
    }

    /// `coeff · r^θ`.
    pub fn power(coeff: f64, theta: f64) -> Self {
        Self::new(RadialProfile::power(theta).scaled(coeff), theta)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(
            RadialProfile::new(move |_| c)
                .with_deriv1(|_| 0.0)
                .with_deriv2(|_| 0.0),
            0.0,
        )
    }

    pub fn zero() -> Self {
        Self::new(
            RadialProfile::new(|_| 0.0)
                .with_deriv1(|_| 0.0)
                .with_deriv2(|_| 0.0),
            f64::INFINITY,
        )
    }

    pub fn value(&self, r: f64) -> f64 {
        self.profile.value(r)
    }

    /// `a·f + b·g`, whose leading exponent is the smaller of the two.
    pub fn linear_combination(a: f64, f: &SourceTerm, b: f64, g: &SourceTerm) -> Self {
        let theta = match (a == 0.0, b == 0.0) {
            (true, true) => f64::INFINITY,
            (true, false) => g.theta_hint,
            (false, true) => f.theta_hint,
            (false, false) => f.theta_hint.min(g.theta_hint),
        };
        Self::new(
            RadialProfile::linear_combination(a, &f.profile, b, &g.profile),
            theta,
        )
    }

    /// `r^e f(r)`, shifting the hint by `e`.
    pub fn times_power(&self, e: f64) -> Self {
        let p = self.profile.clone();
        Self::new(
            RadialProfile::new(move |r| r.powf(e) * p.value(r)),
            self.theta_hint + e,
        )
    }
}
