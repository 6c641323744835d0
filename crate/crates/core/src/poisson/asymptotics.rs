//! Singular coefficient extraction, residual checks and pointwise comparison.

use serde::{Deserialize, Serialize};

use super::source::SourceTerm;
use crate::error::{CknError, Result};
use crate::exponents::{OperatorParams, Regime};
use crate::operator::{apply_radial, phi};
use crate::profile::RadialProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularCoefficient {
    pub k: f64,
    /// Observed order: `q_i - k = O(r_i^order)`, or `O((-ln r_i)^{-order})`
    /// at zero discriminant. Infinite when the normalized samples are constant.
    pub order: f64,
    pub samples_used: usize,
}

/// Estimate `k = lim u(r)/Φ(r)` from samples on a geometric grid tending to 0.
///
/// Away from zero discriminant, `q_i = u(r_i) r_i^{-τ-}` converges geometrically
/// and the last three terms are Aitken-extrapolated. At zero discriminant the
/// correction is a series in `1/(-ln r)`, extrapolated by a quadratic fit
/// through the last three points in that variable.
pub fn singular_coefficient(
    params: &OperatorParams,
    samples: &[(f64, f64)],
) -> Result<SingularCoefficient> {
    if samples.len() < 3 {
        return Err(CknError::NoAsymptote("need at least three samples".into()));
    }
    let mut pts: Vec<(f64, f64)> = samples.to_vec();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    if pts.iter().any(|p| !(p.0 > 0.0) || !p.1.is_finite()) {
        return Err(CknError::NoAsymptote(
            "samples need r > 0 and finite values".into(),
        ));
    }
    let mut q = Vec::with_capacity(pts.len());
    for &(r, u) in &pts {
        q.push(u / phi(params, r)?);
    }
    let n = q.len();
    let scale = q
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let (q0, q1, q2) = (q[n - 3], q[n - 2], q[n - 1]);
    let (d1, d2) = (q1 - q0, q2 - q1);
    if d2.abs() <= 1e-13 * scale {
        return Ok(SingularCoefficient {
            k: q2,
            order: f64::INFINITY,
            samples_used: n,
        });
    }
    if params.regime() == Regime::Critical {
        let t: Vec<f64> = pts[n - 3..].iter().map(|p| -1.0 / p.0.ln()).collect();
        if t.iter().any(|v| !(*v > 0.0)) {
            return Err(CknError::NoAsymptote(
                "critical samples must lie in (0, 1)".into(),
            ));
        }
        // Lagrange interpolation through (t_i, q_i), evaluated at t = 0.
        let ys = [q0, q1, q2];
        let mut k = 0.0;
        for i in 0..3 {
            let mut w = 1.0;
            for j in 0..3 {
                if i != j {
                    w *= t[j] / (t[j] - t[i]);
                }
            }
            k += w * ys[i];
        }
        let order = (d1 / d2).abs().ln() / (t[1] / t[2]).ln();
        if !(order > 0.0) || !k.is_finite() {
            return Err(CknError::NoAsymptote(format!(
                "normalized samples do not settle (order {order})"
            )));
        }
        return Ok(SingularCoefficient {
            k,
            order,
            samples_used: n,
        });
    }
    let ratio = d2 / d1;
    let step = pts[n - 2].0 / pts[n - 1].0;
    let order = (1.0 / ratio).ln() / step.ln();
    if !(ratio > 0.0 && ratio < 1.0) || !(order > 0.0) {
        return Err(CknError::NoAsymptote(format!(
            "normalized samples are not converging geometrically (ratio {ratio})"
        )));
    }
    Ok(SingularCoefficient {
        k: q2 - d2 * d2 / (d2 - d1),
        order,
        samples_used: n,
    })
}

/// `max |Lu - f|` over 200 geometrically spaced radii in `[r_lo, r_hi]`.
pub fn verify_solution(
    params: &OperatorParams,
    u: &RadialProfile,
    f: &SourceTerm,
    r_lo: f64,
    r_hi: f64,
) -> Result<f64> {
    if !(r_lo > 0.0 && r_hi > r_lo) {
        return Err(CknError::Domain(format!(
            "need 0 < r_lo < r_hi (got {r_lo}, {r_hi})"
        )));
    }
    let m = 200;
    let mut worst = 0.0f64;
    for i in 0..m {
        let r = r_lo * (r_hi / r_lo).powf(i as f64 / (m - 1) as f64);
        let r = r.min(r_hi);
        let res = apply_radial(params, u, r)? - f.value(r);
        worst = worst.max(res.abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    /// `u1 ≤ u2 + tol` at every grid point.
    pub ordered: bool,
    /// Largest `u1 - u2` on the grid.
    pub max_excess: f64,
    pub worst_r: f64,
    /// `(u1 - u2)/Φ` at the innermost grid point, the singular-limit side condition.
    pub singular_gap: f64,
}

pub fn comparison_check(
    params: &OperatorParams,
    u1: &RadialProfile,
    u2: &RadialProfile,
    grid: &[f64],
    tol: f64,
) -> Result<OrderingReport> {
    let mut max_excess = f64::NEG_INFINITY;
    let mut worst_r = f64::NAN;
    let mut inner = f64::INFINITY;
    for &r in grid {
        let d = u1.value(r) - u2.value(r);
        if d > max_excess {
            max_excess = d;
            worst_r = r;
        }
        inner = inner.min(r);
    }
    if grid.is_empty() {
        return Err(CknError::Domain("empty comparison grid".into()));
    }
    let singular_gap = (u1.value(inner) - u2.value(inner)) / phi(params, inner)?;
    Ok(OrderingReport {
        ordered: max_excess <= tol,
        max_excess,
        worst_r,
        singular_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: f64, mu1: f64, mu2: f64) -> OperatorParams {
        OperatorParams::new(n, mu1, mu2).unwrap()
    }

    fn geometric(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (1..=20)
            .map(|i| 0.5f64.powi(i))
            .map(|r| (r, f(r)))
            .collect()
    }

    #[test]
    fn classical_samples() {
        let p = params(3.0, 0.0, 0.0);
        let est = singular_coefficient(&p, &geometric(|r| 1.0 / r - 1.0)).unwrap();
        assert!((est.k - 1.0).abs() < 1e-12);
        assert!((est.order - 1.0).abs() < 1e-6);
        let est = singular_coefficient(&p, &geometric(|r| (1.0 - r * r) / 6.0)).unwrap();
        assert!(est.k.abs() < 1e-9);
    }

    #[test]
    fn critical_samples() {
        // u = 3(-ln r) + 2 on N = 2: q = 3 + 2/(-ln r).
        let p = params(2.0, 0.0, 0.0);
        let est = singular_coefficient(&p, &geometric(|r| -3.0 * r.ln() + 2.0)).unwrap();
        assert!((est.k - 3.0).abs() < 1e-10, "{est:?}");
    }

    #[test]
    fn oscillating_samples_are_rejected() {
        let p = params(3.0, 0.0, 0.0);
        let samples: Vec<(f64, f64)> = (1..=12)
            .map(|i| {
                let r = 0.5f64.powi(i);
                (r, (1.0 + 0.5 * (-1f64).powi(i)) / r)
            })
            .collect();
        assert!(matches!(
            singular_coefficient(&p, &samples),
            Err(CknError::NoAsymptote(_))
        ));
    }

    #[test]
    fn residuals_of_known_solutions() {
        let p = params(3.0, 0.0, 0.0);
        let torsion = RadialProfile::new(|r| (1.0 - r * r) / 6.0);
        assert!(
            verify_solution(&p, &torsion, &SourceTerm::constant(1.0), 0.01, 1.0).unwrap() < 1e-6
        );
        let newton = RadialProfile::linear_combination(
            1.0,
            &RadialProfile::power(-1.0),
            -1.0,
            &RadialProfile::power(0.0),
        );
        assert!(verify_solution(&p, &newton, &SourceTerm::zero(), 0.01, 1.0).unwrap() < 1e-6);
    }

    #[test]
    fn ordering() {
        let p = params(3.0, 0.0, -0.2);
        let u1 = RadialProfile::new(|r| 1.0 - r);
        let gamma = RadialProfile::power(p.tau_plus().unwrap());
        let u2 = RadialProfile::linear_combination(1.0, &u1, 1e-3, &gamma);
        let grid: Vec<f64> = (1..=50).map(|i| i as f64 / 50.0).collect();
        assert!(comparison_check(&p, &u1, &u1, &grid, 0.0).unwrap().ordered);
        assert!(comparison_check(&p, &u1, &u2, &grid, 0.0).unwrap().ordered);
        assert!(!comparison_check(&p, &u2, &u1, &grid, 0.0).unwrap().ordered);
    }
}
