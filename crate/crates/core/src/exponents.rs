//! Parameter calculus for `L = -Δ + μ1 x·∇/|x|² + μ2/|x|²`.
//!
//! Radial powers satisfy `L r^τ = c(τ) r^{τ-2}` with the indicial polynomial
//! `c(τ) = -τ(N-2-μ1+τ) + μ2`. Everything in this module follows from the two
//! roots of `c`, the characteristic exponents `τ- ≤ τ+`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{CknError, Result};

/// Relative tolerance on the discriminant below which parameters count as critical.
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

/// Note attached to reports that use the Hardy reduction.
pub const NOTE_HARDY_SHIFT: &str =
    "hardy-reduction: tau(mu_tilde) = tau(mu1,mu2) - mu1/2; the +mu1/2 form does not survive substitution";
/// Note attached to reports that quote Serrin-type exponents.
pub const NOTE_Q_SHARP: &str =
    "q-sharp: mass divergence in dγ = |x|^(tau_plus-mu1) dx needs p >= (N-mu1+theta)/(-tau_plus) - 1; the uncorrected (N+theta)/(-tau_plus) - 1 is reported alongside";
/// Note attached to reports that evaluate fundamental solutions with `μ2 = 0`.
pub const NOTE_LOG_FORM: &str =
    "log-form: for mu2 = 0 the fundamental solution is -|x|^tau ln|x| only when mu1 = N-2 (zero discriminant); otherwise it is the pure power |x|^tau_minus";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Subcritical,
    Critical,
    Inadmissible,
}

impl Regime {
    pub fn is_admissible(self) -> bool {
        self != Regime::Inadmissible
    }
}

/// Dimension and the two coefficients of the operator, with the discriminant
/// `(2-N+μ1)² + 4μ2` and the resulting regime computed once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorParams {
    n: f64,
    mu1: f64,
    mu2: f64,
    discriminant: f64,
    regime: Regime,
}

impl OperatorParams {
    pub fn new(n: f64, mu1: f64, mu2: f64) -> Result<Self> {
        if !(n >= 2.0) || !n.is_finite() {
            return Err(CknError::Dimension(n));
        }
        if !mu1.is_finite() || !mu2.is_finite() {
            return Err(CknError::Domain(format!(
                "coefficients must be finite (mu1 = {mu1}, mu2 = {mu2})"
            )));
        }
        let b = 2.0 - n + mu1;
        let discriminant = b * b + 4.0 * mu2;
        let regime = regime_for(discriminant, b);
        Ok(Self {
            n,
            mu1,
            mu2,
            discriminant,
            regime,
        })
    }

    /// Override the classified regime for boundary studies.
    ///
    /// Forcing `Critical` is accepted when the discriminant is within `1e-6`
    /// (relative) of zero; `Subcritical` needs a strictly positive discriminant.
    pub fn with_regime(mut self, regime: Regime) -> Result<Self> {
        let scale = self.drift_sum().powi(2).max(1.0);
        let ok = match regime {
            Regime::Subcritical => self.discriminant > 0.0,
            Regime::Critical => self.discriminant.abs() <= 1e-6 * scale,
            Regime::Inadmissible => self.discriminant < 0.0,
        };
        if !ok {
            return Err(CknError::Domain(format!(
                "cannot force {regime:?} with discriminant {:e}",
                self.discriminant
            )));
        }
        self.regime = regime;
        Ok(self)
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }

    pub fn discriminant(&self) -> f64 {
        self.discriminant
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// `2 - N + μ1`, the sum of the two exponents.
    pub fn drift_sum(&self) -> f64 {
        2.0 - self.n + self.mu1
    }

    /// Integer dimension, if `N` is one.
    pub fn integer_dimension(&self) -> Option<usize> {
        (self.n.fract() == 0.0 && self.n <= 64.0).then_some(self.n as usize)
    }

    /// Same dimension and drift with a different Hardy coefficient.
    pub fn with_mu2(&self, mu2: f64) -> Result<Self> {
        Self::new(self.n, self.mu1, mu2)
    }

    /// Characteristic exponents `(τ-, τ+)`.
    pub fn exponents(&self) -> Result<(f64, f64)> {
        characteristic_roots(self)
    }

    pub fn tau_plus(&self) -> Result<f64> {
        Ok(self.exponents()?.1)
    }

    pub fn tau_minus(&self) -> Result<f64> {
        Ok(self.exponents()?.0)
    }

    /// Exponent of the weight in `dγ = |x|^{τ+ - μ1} dx`.
    pub fn weight_exponent(&self) -> Result<f64> {
        Ok(self.tau_plus()? - self.mu1)
    }
}

fn regime_for(discriminant: f64, b: f64) -> Regime {
    let tol = CRITICAL_TOLERANCE * (b * b).max(1.0);
    if discriminant.abs() <= tol {
        Regime::Critical
    } else if discriminant > 0.0 {
        Regime::Subcritical
    } else {
        Regime::Inadmissible
    }
}

/// Roots of `τ² - bτ - μ2 = 0`, computed without cancellation.
fn characteristic_roots(params: &OperatorParams) -> Result<(f64, f64)> {
    let b = params.drift_sum();
    match params.regime {
        Regime::Inadmissible => Err(CknError::Inadmissible(params.discriminant)),
        Regime::Critical => Ok((0.5 * b, 0.5 * b)),
        Regime::Subcritical => {
            let s = params.discriminant.sqrt();
            let mu2 = params.mu2;
            if b >= 0.0 {
                let plus = 0.5 * (b + s);
                let minus = if plus != 0.0 {
                    -mu2 / plus
                } else {
                    0.5 * (b - s)
                };
                Ok((minus, plus))
            } else {
                let minus = 0.5 * (b - s);
                let plus = if minus != 0.0 {
                    -mu2 / minus
                } else {
                    0.5 * (b + s)
                };
                Ok((minus, plus))
            }
        }
    }
}

/// Classify `(N, μ1, μ2)` by the sign of the discriminant.
pub fn classify_params(n: f64, mu1: f64, mu2: f64) -> Result<Regime> {
    Ok(OperatorParams::new(n, mu1, mu2)?.regime())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentData {
    pub tau_minus: f64,
    pub tau_plus: f64,
    pub tau_zero: f64,
    pub discriminant: f64,
    /// Constant of the weighted identity `∫ Φ L*ξ dγ = c ξ(0)`.
    pub c_const: f64,
    /// `|S^{N-1}|`.
    pub sphere_area: f64,
}

pub fn exponent_data(params: &OperatorParams) -> Result<ExponentData> {
    let (tau_minus, tau_plus) = params.exponents()?;
    let area = sphere_area(params.n());
    let c_const = match params.regime() {
        Regime::Subcritical => params.discriminant().sqrt() * area,
        _ => area,
    };
    Ok(ExponentData {
        tau_minus,
        tau_plus,
        tau_zero: 0.5 * params.drift_sum(),
        discriminant: params.discriminant(),
        c_const,
        sphere_area: area,
    })
}

/// The indicial polynomial `c(τ) = -τ(N-2-μ1+τ) + μ2`.
pub fn indicial(params: &OperatorParams, tau: f64) -> f64 {
    -tau * (params.n() - 2.0 - params.mu1() + tau) + params.mu2()
}

/// Result of conjugating by `r^{μ1/2}`: `L_{μ1,μ2}(r^{μ1/2} v) = r^{μ1/2} (-Δ + μ̃/r²) v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyReduction {
    pub mu_tilde: f64,
    /// `τ±(μ̃) = τ±(μ1, μ2) + exponent_shift`.
    pub exponent_shift: f64,
    /// `(N, 0, μ̃)`, carrying over the regime of the original parameters.
    pub reduced: OperatorParams,
}

pub fn hardy_reduction(params: &OperatorParams) -> Result<HardyReduction> {
    let (n, mu1) = (params.n(), params.mu1());
    let mu_tilde = params.mu2() + 0.25 * mu1 * mu1 - 0.5 * mu1 * (n - 2.0);
    let mut reduced = OperatorParams::new(n, 0.0, mu_tilde)?;
    if reduced.regime() != params.regime() {
        // Discriminants agree algebraically; only rounding can split them.
        reduced = OperatorParams {
            regime: params.regime(),
            ..reduced
        };
    }
    Ok(HardyReduction {
        mu_tilde,
        exponent_shift: 0.0 - 0.5 * mu1,
        reduced,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalExponents {
    /// `1 + (2+θ)/(-τ+)`.
    pub p_sharp: f64,
    /// `(N+θ)/(-τ+) - 1`, without the drift correction.
    pub q_sharp: f64,
    /// `(N-μ1+θ)/(-τ+) - 1`, where `|x|^{θ+pτ+}` stops being `dγ`-integrable.
    pub q_sharp_measure: f64,
}

pub fn critical_exponents(params: &OperatorParams, theta: f64) -> Result<CriticalExponents> {
    if !(theta > -2.0) {
        return Err(CknError::Domain(format!("theta = {theta} must exceed -2")));
    }
    let tau_plus = params.tau_plus()?;
    if tau_plus >= 0.0 {
        return Err(CknError::NoSerrinExponent(tau_plus));
    }
    let denom = -tau_plus;
    Ok(CriticalExponents {
        p_sharp: 1.0 + (2.0 + theta) / denom,
        q_sharp: (params.n() + theta) / denom - 1.0,
        q_sharp_measure: (params.n() - params.mu1() + theta) / denom - 1.0,
    })
}

/// Area of the unit sphere `S^{N-1}`, `2π^{N/2}/Γ(N/2)`.
///
/// Integer dimensions use the two-step recursion `|S^{n+1}| = 2π/n · |S^{n-1}|`,
/// which is exact up to rounding; other real `N` go through the Gamma function.
pub fn sphere_area(n: f64) -> f64 {
    if n.fract() == 0.0 && (2.0..=200.0).contains(&n) {
        let k = n as u32;
        let (mut area, mut dim) = if k.is_multiple_of(2) {
            (2.0 * PI, 2u32)
        } else {
            (4.0 * PI, 3u32)
        };
        while dim < k {
            area *= 2.0 * PI / f64::from(dim);
            dim += 2;
        }
        area
    } else {
        2.0 * PI.powf(0.5 * n) / statrs::function::gamma::gamma(0.5 * n)
    }
}
