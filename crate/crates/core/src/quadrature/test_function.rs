//! Compactly supported C² test functions on `R^N`.

use std::fmt;
use std::sync::Arc;

use crate::profile::RadialProfile;

type ScalarField = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type VectorField = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Radial(RadialProfile),
    General {
        value: ScalarField,
        gradient: VectorField,
        laplacian: ScalarField,
    },
}

/// `ξ ∈ C²_c(R^N)`, vanishing for `|x| ≥ support_radius`.
#[derive(Clone)]
pub struct TestFunction {
    shape: Shape,
    support_radius: f64,
    dim: usize,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("radial", &self.is_radial())
            .field("support_radius", &self.support_radius)
            .field("dim", &self.dim)
            .finish()
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Difference step for profiles without analytic derivatives.
fn step(r: f64) -> f64 {
    (1e-4 * r).max(1e-5)
}

impl TestFunction {
    /// `ξ(x) = u(|x|)`. The profile must carry a support radius.
    pub fn radial(profile: RadialProfile, dim: usize) -> Self {
        let support_radius = profile.support_radius().unwrap_or(f64::INFINITY);
        Self {
            shape: Shape::Radial(profile),
            support_radius,
            dim,
        }
    }

    pub fn general(
        dim: usize,
        support_radius: f64,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        laplacian: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            shape: Shape::General {
                value: Arc::new(value),
                gradient: Arc::new(gradient),
                laplacian: Arc::new(laplacian),
            },
            support_radius,
            dim,
        }
    }

    /// The standard `C^∞` bump with `ξ(0) = 1`.
    pub fn smooth_bump(radius: f64, dim: usize) -> Self {
        Self::radial(RadialProfile::smooth_bump(radius), dim)
    }

    /// The polynomial `C²` bump `(1 - |x|²/R²)³₊`.
    pub fn poly_bump(radius: f64, dim: usize) -> Self {
        Self::radial(RadialProfile::poly_bump(radius), dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.shape, Shape::Radial(_))
    }

    pub fn radial_profile(&self) -> Option<&RadialProfile> {
        match &self.shape {
            Shape::Radial(p) => Some(p),
            Shape::General { .. } => None,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Radial(p) => p.value(norm(x)),
            Shape::General { value, .. } => value(x),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match &self.shape {
            Shape::Radial(p) => {
                let r = norm(x);
                if r == 0.0 {
                    return vec![0.0; x.len()];
                }
                let d1 = p.deriv1(r, step(r));
                x.iter().map(|v| d1 * v / r).collect()
            }
            Shape::General { gradient, .. } => gradient(x),
        }
    }

    /// `Δξ(x)`; for radial `ξ` this is `u'' + (N-1)u'/r`, and `N u''(0)` at the origin.
    pub fn laplacian(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Radial(p) => {
                let r = norm(x);
                let n = x.len() as f64;
                if r == 0.0 {
                    let h = 1e-4 * self.support_radius.min(1.0);
                    return n * p
                        .analytic_deriv2(0.0)
                        .unwrap_or_else(|| 2.0 * (p.value(h) - p.value(0.0)) / (h * h));
                }
                let h = step(r);
                p.deriv2(r, h) + (n - 1.0) * p.deriv1(r, h) / r
            }
            Shape::General { laplacian, .. } => laplacian(x),
        }
    }

    /// `x ↦ ξ(x - z)`.
    pub fn shifted(&self, z: &[f64]) -> Self {
        let z: Vec<f64> = z.to_vec();
        let back =
            |x: &[f64], z: &[f64]| -> Vec<f64> { x.iter().zip(z).map(|(a, b)| a - b).collect() };
        let (f, g, l) = (self.clone(), self.clone(), self.clone());
        let (z1, z2, z3) = (z.clone(), z.clone(), z.clone());
        Self::general(
            self.dim,
            self.support_radius + norm(&z),
            move |x| f.value(&back(x, &z1)),
            move |x| g.gradient(&back(x, &z2)),
            move |x| l.laplacian(&back(x, &z3)),
        )
    }

    /// `x ↦ ξ(x)·(c0 + c·x)`.
    pub fn times_affine(&self, c0: f64, c: &[f64]) -> Self {
        let c: Vec<f64> = c.to_vec();
        let affine =
            move |x: &[f64], c: &[f64]| c0 + x.iter().zip(c).map(|(a, b)| a * b).sum::<f64>();
        let (f, g, l) = (self.clone(), self.clone(), self.clone());
        let (c1, c2, c3) = (c.clone(), c.clone(), c);
        Self::general(
            self.dim,
            self.support_radius,
            move |x| f.value(x) * affine(x, &c1),
            move |x| {
                let a = affine(x, &c2);
                let v = g.value(x);
                g.gradient(x)
                    .iter()
                    .zip(&c2)
                    .map(|(d, ci)| d * a + v * ci)
                    .collect()
            },
            move |x| {
                let grad = l.gradient(x);
                let cross: f64 = grad.iter().zip(&c3).map(|(d, ci)| d * ci).sum();
                l.laplacian(x) * affine(x, &c3) + 2.0 * cross
            },
        )
    }

    /// `a·f + b·g`, staying radial when both are.
    pub fn linear_combination(a: f64, f: &TestFunction, b: f64, g: &TestFunction) -> Self {
        let dim = f.dim.max(g.dim);
        if let (Some(pf), Some(pg)) = (f.radial_profile(), g.radial_profile()) {
            return Self::radial(RadialProfile::linear_combination(a, pf, b, pg), dim);
        }
        let (f1, f2, f3) = (f.clone(), f.clone(), f.clone());
        let (g1, g2, g3) = (g.clone(), g.clone(), g.clone());
        Self::general(
            dim,
            f.support_radius.max(g.support_radius),
            move |x| a * f1.value(x) + b * g1.value(x),
            move |x| {
                f2.gradient(x)
                    .iter()
                    .zip(g2.gradient(x))
                    .map(|(u, v)| a * u + b * v)
                    .collect()
            },
            move |x| a * f3.laplacian(x) + b * g3.laplacian(x),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_laplacian(xi: &TestFunction, x: &[f64]) -> f64 {
        let h = 1e-4;
        let mut s = 0.0;
        for i in 0..x.len() {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += h;
            m[i] -= h;
            s += xi.value(&p) - 2.0 * xi.value(x) + xi.value(&m);
        }
        s / (h * h)
    }

    fn fd_gradient(xi: &TestFunction, x: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        (0..x.len())
            .map(|i| {
                let mut p = x.to_vec();
                let mut m = x.to_vec();
                p[i] += h;
                m[i] -= h;
                (xi.value(&p) - xi.value(&m)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn derivatives_agree_with_differences() {
        let bump = TestFunction::smooth_bump(1.0, 3);
        let tilted = bump.times_affine(1.0, &[0.5, 0.0, 0.0]);
        let moved = TestFunction::poly_bump(0.8, 2).shifted(&[0.1, -0.2]);
        let cases: [(&TestFunction, Vec<f64>); 3] = [
            (&bump, vec![0.2, -0.3, 0.4]),
            (&tilted, vec![0.1, 0.5, -0.2]),
            (&moved, vec![0.3, 0.1]),
        ];
        for (xi, x) in cases {
            let lap = xi.laplacian(&x);
            assert!((lap - fd_laplacian(xi, &x)).abs() < 1e-5 * (1.0 + lap.abs()));
            for (a, b) in xi.gradient(&x).iter().zip(fd_gradient(xi, &x)) {
                assert!((a - b).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn values_at_origin() {
        let bump = TestFunction::smooth_bump(1.0, 2);
        assert!((bump.value(&[0.0, 0.0]) - 1.0).abs() < 1e-15);
        assert_eq!(bump.gradient(&[0.0, 0.0]), vec![0.0, 0.0]);
        // u(r) = e^{1 - 1/(1-r²)} has u''(0) = -2.
        assert!((bump.laplacian(&[0.0, 0.0]) + 4.0).abs() < 1e-6);
        let moved = bump.shifted(&[0.3, 0.0]);
        assert!((moved.value(&[0.3, 0.0]) - 1.0).abs() < 1e-15);
        assert_eq!(moved.support_radius(), 1.3);
        assert!(!moved.is_radial());
    }

    #[test]
    fn combinations_stay_radial() {
        let a = TestFunction::smooth_bump(1.0, 3);
        let b = TestFunction::poly_bump(0.5, 3);
        let c = TestFunction::linear_combination(2.0, &a, -1.0, &b);
        assert!(c.is_radial());
        let x = [0.1, 0.2, 0.3];
        assert!((c.value(&x) - (2.0 * a.value(&x) - b.value(&x))).abs() < 1e-15);
    }
}
