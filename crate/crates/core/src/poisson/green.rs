//! Variation of parameters for `Lu = f` on `B_R \ {0}` with `u(R) = 0`.
//!
//! With the homogeneous pair `y1 = Φ` and `y2 = Γ`, and `p = r^{N-1-μ1}` so
//! that `p·W(y1, y2) = s` is constant,
//!
//! `u_p(r) = (y1(r) ∫_0^r y2 p f + y2(r) ∫_r^R y1 p f) / s`
//!
//! solves `L u_p = f`. The solution family is `u = k y1 + u_p + B y2`.
//! Both cumulative integrals are tabulated once on a geometric grid; a value
//! at `r` is the table entry at the grid node below `r` plus one Gauss–Kronrod
//! panel, which keeps `u` smooth in `r` at the level of rounding.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::gate::{weighted_l1_gate, GateDecision};
use super::source::SourceTerm;
use crate::error::{CknError, Result};
use crate::exponents::{OperatorParams, Regime};
use crate::operator::apply_radial;
use crate::profile::RadialProfile;
use crate::quadrature::{gk15, integrate_interval, integrate_singular, QuadratureSpec};

/// Grid nodes per factor of two in radius.
const NODES_PER_OCTAVE: usize = 8;
/// Octaves tabulated below `R`.
const OCTAVES: usize = 40;
/// `θ + 2` this close to an exponent counts as resonant.
pub const RESONANCE_TOLERANCE: f64 = 1e-9;
/// Sample points stored with a solution.
const GRID_POINTS: usize = 101;

struct Representation {
    y1: RadialProfile,
    y2: RadialProfile,
    s: f64,
    radius: f64,
    weight: f64,
    source: SourceTerm,
    spec: QuadratureSpec,
    /// Ascending, `nodes[last] = R`.
    nodes: Vec<f64>,
    /// `∫_0^{nodes[j]} y2 p f`.
    inner: Vec<f64>,
    /// `∫_{nodes[j]}^R y1 p f`.
    outer: Vec<f64>,
}

impl Representation {
    fn inner_integrand(&self, t: f64) -> f64 {
        self.y2.value(t) * t.powf(self.weight) * self.source.value(t)
    }

    fn outer_integrand(&self, t: f64) -> f64 {
        self.y1.value(t) * t.powf(self.weight) * self.source.value(t)
    }

    fn panel(&self, g: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let est = gk15(&g, a, b);
        let tol = (self.spec.rel_tol * est.value.abs()).max(self.spec.abs_tol);
        if est.error <= tol {
            est.value
        } else {
            integrate_interval(g, a, b, &self.spec).value
        }
    }

    fn build(
        y1: RadialProfile,
        y2: RadialProfile,
        s: f64,
        weight: f64,
        radius: f64,
        source: SourceTerm,
        spec: QuadratureSpec,
    ) -> Result<Self> {
        let count = NODES_PER_OCTAVE * OCTAVES;
        let step = 0.5f64.powf(1.0 / NODES_PER_OCTAVE as f64);
        let mut nodes: Vec<f64> = (0..=count)
            .map(|j| radius * step.powi((count - j) as i32))
            .collect();
        nodes[count] = radius;
        let mut rep = Self {
            y1,
            y2,
            s,
            radius,
            weight,
            source,
            spec,
            nodes,
            inner: Vec::new(),
            outer: Vec::new(),
        };
        let base = integrate_singular(|t| rep.inner_integrand(t), rep.nodes[0], &rep.spec);
        if !base.converged {
            return Err(CknError::NotConverged(format!(
                "inner Green integral near the origin: {base:?}"
            )));
        }
        let mut inner = vec![base.value];
        for w in rep.nodes.windows(2) {
            let inc = rep.panel(|t| rep.inner_integrand(t), w[0], w[1]);
            inner.push(inner.last().unwrap() + inc);
        }
        let mut outer = vec![0.0; rep.nodes.len()];
        for j in (0..count).rev() {
            let inc = rep.panel(|t| rep.outer_integrand(t), rep.nodes[j], rep.nodes[j + 1]);
            outer[j] = outer[j + 1] + inc;
        }
        rep.inner = inner;
        rep.outer = outer;
        Ok(rep)
    }

    /// `(∫_0^r y2 p f, ∫_r^R y1 p f)`.
    fn integrals(&self, r: f64) -> (f64, f64) {
        if r >= self.radius {
            let last = self.nodes.len() - 1;
            return (self.inner[last], 0.0);
        }
        if r < self.nodes[0] {
            let inner = integrate_singular(|t| self.inner_integrand(t), r, &self.spec).value;
            let outer = self.outer[0]
                + integrate_interval(|t| self.outer_integrand(t), r, self.nodes[0], &self.spec)
                    .value;
            return (inner, outer);
        }
        let j = self.nodes.partition_point(|&x| x <= r) - 1;
        let a = self.nodes[j];
        if r == a {
            return (self.inner[j], self.outer[j]);
        }
        let inner = self.inner[j] + gk15(&|t| self.inner_integrand(t), a, r).value;
        let outer = self.outer[j] - gk15(&|t| self.outer_integrand(t), a, r).value;
        (inner, outer)
    }

    fn particular(&self, r: f64) -> (f64, f64, f64) {
        let (i, o) = self.integrals(r);
        let h = 1e-4 * r;
        let v = (self.y1.value(r) * i + self.y2.value(r) * o) / self.s;
        let d1 = (self.y1.deriv1(r, h) * i + self.y2.deriv1(r, h) * o) / self.s;
        let d2 =
            (self.y1.deriv2(r, h) * i + self.y2.deriv2(r, h) * o) / self.s - self.source.value(r);
        (v, d1, d2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub r: f64,
    pub u: f64,
    pub residual: f64,
}

/// `u = k Φ + u_p + boundary_coeff · Γ` on `(0, R]`.
#[derive(Clone)]
pub struct GreenSolution {
    pub k: f64,
    pub boundary_coeff: f64,
    pub radius: f64,
    pub regime: Regime,
    /// `θ + 2` sits on a characteristic exponent; `u_p` then carries a log.
    pub resonant: bool,
    pub gate: GateDecision,
    pub grid: Vec<GridSample>,
    params: OperatorParams,
    rep: Arc<Representation>,
}

impl std::fmt::Debug for GreenSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GreenSolution")
            .field("k", &self.k)
            .field("boundary_coeff", &self.boundary_coeff)
            .field("radius", &self.radius)
            .field("regime", &self.regime)
            .field("resonant", &self.resonant)
            .finish()
    }
}

impl GreenSolution {
    pub fn params(&self) -> &OperatorParams {
        &self.params
    }

    pub fn value(&self, r: f64) -> f64 {
        self.value_and_derivatives(r).0
    }

    /// `(u, u', u'')` at `r`.
    pub fn value_and_derivatives(&self, r: f64) -> (f64, f64, f64) {
        let rep = &self.rep;
        let h = 1e-4 * r;
        let (p, p1, p2) = rep.particular(r);
        let (k, b) = (self.k, self.boundary_coeff);
        (
            k * rep.y1.value(r) + p + b * rep.y2.value(r),
            k * rep.y1.deriv1(r, h) + p1 + b * rep.y2.deriv1(r, h),
            k * rep.y1.deriv2(r, h) + p2 + b * rep.y2.deriv2(r, h),
        )
    }

    /// The particular part `u_p`, with `u_p(R)` generally nonzero.
    pub fn particular(&self, r: f64) -> f64 {
        self.rep.particular(r).0
    }

    /// `u` as a profile with analytic derivatives, evaluable on `(0, R]`.
    pub fn profile(&self) -> RadialProfile {
        let (a, b, c) = (self.clone(), self.clone(), self.clone());
        RadialProfile::new(move |r| a.value(r))
            .with_deriv1(move |r| b.value_and_derivatives(r).1)
            .with_deriv2(move |r| c.value_and_derivatives(r).2)
            .with_support(self.radius)
    }

    pub fn particular_profile(&self) -> RadialProfile {
        let (a, b, c) = (self.rep.clone(), self.rep.clone(), self.rep.clone());
        RadialProfile::new(move |r| a.particular(r).0)
            .with_deriv1(move |r| b.particular(r).1)
            .with_deriv2(move |r| c.particular(r).2)
            .with_support(self.radius)
    }

    pub fn source(&self) -> &SourceTerm {
        &self.rep.source
    }

    /// `(r, u(r))` at `r_i = R·ratio^{i+1}`, `i < count`.
    pub fn singular_samples(&self, count: usize, ratio: f64) -> Vec<(f64, f64)> {
        (1..=count)
            .map(|i| {
                let r = self.radius * ratio.powi(i as i32);
                (r, self.value(r))
            })
            .collect()
    }

    fn sample_grid(&self) -> Vec<GridSample> {
        let profile = self.profile();
        let lo = self.radius * 1e-3;
        (0..GRID_POINTS)
            .map(|i| {
                let t = i as f64 / (GRID_POINTS - 1) as f64;
                let r = if i + 1 == GRID_POINTS {
                    self.radius
                } else {
                    lo * (self.radius / lo).powf(t)
                };
                let u = profile.value(r);
                let residual = apply_radial(&self.params, &profile, r)
                    .map(|v| v - self.rep.source.value(r))
                    .unwrap_or(f64::NAN);
                GridSample { r, u, residual }
            })
            .collect()
    }
}

pub fn green_solve(
    params: &OperatorParams,
    f: &SourceTerm,
    radius: f64,
    k: f64,
    spec: &QuadratureSpec,
) -> Result<GreenSolution> {
    let regime = params.regime();
    if regime == Regime::Inadmissible {
        return Err(CknError::Inadmissible(params.discriminant()));
    }
    if regime == Regime::Critical && radius > 1.0 {
        return Err(CknError::Domain(format!(
            "zero-discriminant solves need R <= 1 so that -ln r stays positive (got R = {radius})"
        )));
    }
    let gate = weighted_l1_gate(params, f, radius, spec)?;
    if let GateDecision::Divergent { exponent, .. } = gate {
        return Err(CknError::NonIntegrableSource { exponent });
    }
    let (minus, plus) = params.exponents()?;
    let (y1, y2, s) = match regime {
        Regime::Critical => (
            RadialProfile::power_log(minus),
            RadialProfile::power(plus),
            1.0,
        ),
        _ => (
            RadialProfile::power(minus),
            RadialProfile::power(plus),
            plus - minus,
        ),
    };
    let weight = params.n() - 1.0 - params.mu1();
    let a = f.theta_hint + 2.0;
    let resonant = a.is_finite()
        && ((a - plus).abs() < RESONANCE_TOLERANCE || (a - minus).abs() < RESONANCE_TOLERANCE);
    let rep = Representation::build(y1, y2, s, weight, radius, f.clone(), *spec)?;
    let u_p_at_r = rep.particular(radius).0;
    let boundary_coeff = -(k * rep.y1.value(radius) + u_p_at_r) / rep.y2.value(radius);
    let mut solution = GreenSolution {
        k,
        boundary_coeff,
        radius,
        regime,
        resonant,
        gate,
        grid: Vec::new(),
        params: *params,
        rep: Arc::new(rep),
    };
    solution.grid = solution.sample_grid();
    Ok(solution)
}
