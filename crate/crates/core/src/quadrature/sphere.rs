//! Product rules on the unit circle and the unit sphere.

use std::f64::consts::PI;

use super::rules::gauss_legendre;
use crate::error::{CknError, Result};

/// Nodes `ω_i ∈ S^{N-1}` and weights summing to `|S^{N-1}|`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// Trapezoid on the circle (`N = 2`, `n_azimuth` points), or Gauss–Legendre in
    /// `cos θ` with `n_polar` nodes times trapezoid in azimuth (`N = 3`).
    pub fn new(dim: usize, n_polar: usize, n_azimuth: usize) -> Result<Self> {
        let azimuth: Vec<f64> = (0..n_azimuth)
            .map(|j| 2.0 * PI * j as f64 / n_azimuth as f64)
            .collect();
        let daz = 2.0 * PI / n_azimuth as f64;
        match dim {
            2 => Ok(Self {
                nodes: azimuth.iter().map(|t| vec![t.cos(), t.sin()]).collect(),
                weights: vec![daz; n_azimuth],
            }),
            3 => {
                let (z, w) = gauss_legendre(n_polar);
                let mut nodes = Vec::with_capacity(n_polar * n_azimuth);
                let mut weights = Vec::with_capacity(n_polar * n_azimuth);
                for (zi, wi) in z.iter().zip(&w) {
                    let s = (1.0 - zi * zi).sqrt();
                    for t in &azimuth {
                        nodes.push(vec![s * t.cos(), s * t.sin(), *zi]);
                        weights.push(wi * daz);
                    }
                }
                Ok(Self { nodes, weights })
            }
            _ => Err(CknError::Domain(format!(
                "sphere quadrature is available for N = 2, 3 only (got {dim})"
            ))),
        }
    }

    pub fn default_for(dim: usize) -> Result<Self> {
        match dim {
            2 => Self::new(2, 0, 64),
            _ => Self::new(dim, 24, 48),
        }
    }

    /// `∫_{S^{N-1}} g(r ω) dω`.
    pub fn integrate_at_radius(&self, r: f64, g: impl Fn(&[f64]) -> f64) -> f64 {
        let mut x = vec![0.0; self.nodes.first().map_or(0, Vec::len)];
        let mut terms: Vec<f64> = Vec::with_capacity(self.weights.len());
        for (omega, w) in self.nodes.iter().zip(&self.weights) {
            for (xi, oi) in x.iter_mut().zip(omega) {
                *xi = r * oi;
            }
            terms.push(w * g(&x));
        }
        super::rules::compensated_sum(terms)
    }
}
