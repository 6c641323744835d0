//! Adaptive panel integration on finite intervals and on `(0, R]`.
//!
//! `(0, R]` is cut into geometric levels `[Rρ^{k+1}, Rρ^k]`. Panels are
//! refined by bisection in order of their error estimate; what lies below the
//! deepest level is estimated from the ratio of the last level sums, which is
//! exact for pure powers `r^β` and asymptotically exact for `r^β h(r)` with
//! `h` smooth. Final sums run over panels sorted by position with compensated
//! summation, so the value does not depend on evaluation order.

use serde::{Deserialize, Serialize};

use super::rules::{compensated_sum, gk15};

/// Number of geometric levels laid down before the tail estimate is trusted.
const MIN_LEVELS: usize = 4;
/// Cap on bisections per call.
const MAX_SUBDIVISIONS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Depth bound, both for geometric levels toward 0 and for bisection of any panel.
    pub max_levels: usize,
    /// Ratio `ρ` of the geometric levels.
    pub cluster_ratio: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_levels: 60,
            cluster_ratio: 0.5,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_levels(mut self, max_levels: usize) -> Self {
        self.max_levels = max_levels;
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.cluster_ratio > 0.0
            && self.cluster_ratio < 1.0
            && self.max_levels >= MIN_LEVELS;
        if ok {
            Ok(())
        } else {
            Err(crate::CknError::Config(format!(
                "invalid quadrature spec {self:?}"
            )))
        }
    }

    fn tolerance(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
    depth: usize,
    level: usize,
}

struct PanelSet<'f, F: ?Sized> {
    f: &'f F,
    panels: Vec<Panel>,
    evaluations: usize,
    subdivisions: usize,
}

impl<'f, F: Fn(f64) -> f64 + ?Sized> PanelSet<'f, F> {
    fn new(f: &'f F) -> Self {
        Self {
            f,
            panels: Vec::new(),
            evaluations: 0,
            subdivisions: 0,
        }
    }

    fn push(&mut self, a: f64, b: f64, depth: usize, level: usize) {
        let est = gk15(self.f, a, b);
        self.evaluations += 15;
        let (value, error) = if est.value.is_finite() && est.error.is_finite() {
            (est.value, est.error)
        } else {
            (est.value, f64::INFINITY)
        };
        self.panels.push(Panel {
            a,
            b,
            value,
            error,
            floor: est.floor,
            depth,
            level,
        });
    }

    fn value(&self) -> f64 {
        let mut sorted: Vec<&Panel> = self.panels.iter().collect();
        sorted.sort_by(|x, y| x.a.total_cmp(&y.a));
        compensated_sum(sorted.iter().map(|p| p.value))
    }

    fn error(&self) -> f64 {
        let mut errs: Vec<f64> = self.panels.iter().map(|p| p.error).collect();
        errs.sort_by(f64::total_cmp);
        compensated_sum(errs)
    }

    /// Bisect the worst splittable panel; false when nothing can be split.
    fn bisect_worst(&mut self, max_depth: usize) -> bool {
        if self.subdivisions >= MAX_SUBDIVISIONS {
            return false;
        }
        let mut worst: Option<usize> = None;
        for (i, p) in self.panels.iter().enumerate() {
            let mid = 0.5 * (p.a + p.b);
            let splittable = p.depth < max_depth && mid > p.a && mid < p.b;
            if !splittable || p.error <= 1.5 * p.floor {
                continue;
            }
            match worst {
                Some(j) if self.panels[j].error >= p.error => {}
                _ => worst = Some(i),
            }
        }
        let Some(i) = worst else { return false };
        let p = self.panels.swap_remove(i);
        let mid = 0.5 * (p.a + p.b);
        self.push(p.a, mid, p.depth + 1, p.level);
        self.push(mid, p.b, p.depth + 1, p.level);
        self.subdivisions += 1;
        true
    }

    /// Refine until the panel error is within `budget(value)` or refinement stalls.
    fn refine(&mut self, max_depth: usize, budget: impl Fn(f64) -> f64) -> bool {
        loop {
            let err: f64 = self.panels.iter().map(|p| p.error).sum();
            let value: f64 = self.panels.iter().map(|p| p.value).sum();
            if err <= budget(value) {
                return true;
            }
            if !value.is_finite() {
                return false;
            }
            if !self.bisect_worst(max_depth) {
                return false;
            }
        }
    }

    fn level_sums(&self, levels: usize) -> (Vec<f64>, Vec<f64>) {
        let mut groups: Vec<Vec<(f64, f64, f64)>> = vec![Vec::new(); levels];
        for p in &self.panels {
            groups[p.level].push((p.a, p.value, p.error));
        }
        let mut sums = Vec::with_capacity(levels);
        let mut errs = Vec::with_capacity(levels);
        for mut g in groups {
            g.sort_by(|x, y| x.0.total_cmp(&y.0));
            sums.push(compensated_sum(g.iter().map(|t| t.1)));
            errs.push(compensated_sum(g.iter().map(|t| t.2)));
        }
        (sums, errs)
    }
}

/// Global adaptive Gauss–Kronrod integration over `[a, b]`.
pub fn integrate_interval<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> QuadratureResult {
    if a == b {
        return QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let mut set = PanelSet::new(&f);
    set.push(a, b, 0, 0);
    let ok = set.refine(spec.max_levels, |v| spec.tolerance(v));
    let value = set.value();
    let error = set.error();
    QuadratureResult {
        value,
        error_estimate: error,
        evaluations: set.evaluations,
        converged: ok && value.is_finite() && error <= spec.tolerance(value),
    }
}

/// Remainder below the deepest level, from the ratio of the last level sums.
fn tail_estimate(sums: &[f64], errs: &[f64]) -> (f64, f64) {
    let n = sums.len();
    let (a, b, c) = (sums[n - 3], sums[n - 2], sums[n - 1]);
    if b == 0.0 && c == 0.0 {
        return (0.0, 0.0);
    }
    let q = c / b;
    let q_prev = b / a;
    let geometric = |x: f64| x.is_finite() && x > 0.0 && x < 1.0;
    if geometric(q) && geometric(q_prev) {
        let tail = c * q / (1.0 - q);
        let earlier = b * q_prev / (1.0 - q_prev) - c;
        let err = (tail - earlier).abs() + errs[n - 1] * q / (1.0 - q);
        (tail, err)
    } else if q.is_finite() && q.abs() >= 1.0 {
        (0.0, f64::INFINITY)
    } else {
        (0.0, b.abs() + c.abs())
    }
}

/// Integrate `g` over `(0, r_max]`, tolerating power and log behavior at 0.
///
/// Never evaluates `g(0)`. A non-converged result carries the best estimate.
pub fn integrate_singular<F: Fn(f64) -> f64>(
    g: F,
    r_max: f64,
    spec: &QuadratureSpec,
) -> QuadratureResult {
    let rho = spec.cluster_ratio;
    let mut set = PanelSet::new(&g);
    let mut levels = 0usize;
    let mut upper = r_max;
    let add_level = |set: &mut PanelSet<'_, F>, levels: &mut usize, upper: &mut f64| {
        let lower = *upper * rho;
        set.push(lower, *upper, 0, *levels);
        *levels += 1;
        *upper = lower;
    };
    while levels < MIN_LEVELS {
        add_level(&mut set, &mut levels, &mut upper);
    }
    loop {
        let refined = set.refine(spec.max_levels, |v| 0.5 * spec.tolerance(v));
        let (sums, errs) = set.level_sums(levels);
        let (tail, tail_err) = tail_estimate(&sums, &errs);
        let value = set.value() + tail;
        let total_err = set.error() + tail_err;
        let tol = spec.tolerance(value);
        let done = total_err <= tol && tail_err <= 0.25 * tol && value.is_finite();
        if done || levels >= spec.max_levels || (!refined && tail_err <= 0.25 * tol) {
            return QuadratureResult {
                value,
                error_estimate: total_err,
                evaluations: set.evaluations,
                converged: done,
            };
        }
        add_level(&mut set, &mut levels, &mut upper);
    }
}

/// Both halves of an integral over `(0, ∞)` split at `split`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfLineResult {
    pub origin: QuadratureResult,
    pub infinity: QuadratureResult,
}

impl HalfLineResult {
    pub fn value(&self) -> f64 {
        self.origin.value + self.infinity.value
    }

    pub fn converged(&self) -> bool {
        self.origin.converged && self.infinity.converged
    }
}

/// `∫_0^∞ g`, as `∫_0^s g(r) dr + ∫_0^1 g(s/t) s/t² dt`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(
    g: F,
    split: f64,
    spec: &QuadratureSpec,
) -> HalfLineResult {
    let origin = integrate_singular(&g, split, spec);
    let infinity = integrate_singular(
        |t: f64| {
            let r = split / t;
            if r.is_finite() {
                g(r) * split / (t * t)
            } else {
                0.0
            }
        },
        1.0,
        spec,
    );
    HalfLineResult { origin, infinity }
}
