//! ∫ Φ L*ξ dγ = c ξ(0) for radial and non-radial test functions.

use cknkit::exponents::OperatorParams;
use cknkit::quadrature::{identity_residual, QuadratureSpec, TestFunction};

fn main() -> cknkit::Result<()> {
    let spec = QuadratureSpec::default();
    for (n, mu1, mu2) in [(3.0, 0.0, 0.0), (3.0, 0.0, -0.25), (4.0, 0.5, -0.5)] {
        let params = OperatorParams::new(n, mu1, mu2)?;
        let xi = TestFunction::smooth_bump(1.0, n as usize);
        let res = identity_residual(&params, &xi, &spec)?;
        println!(
            "N={n} mu1={mu1} mu2={mu2}: lhs={:.12} c*xi(0)={:.12} rel residual={:.1e} ({:?})",
            res.lhs, res.expected, res.residual, res.path
        );
    }

    // exp(x1) times a bump: not radial, ξ(0) = 1.
    let bump = cknkit::profile::RadialProfile::smooth_bump(1.0);
    let (b0, b1, b2) = (bump.clone(), bump.clone(), bump);
    let h = 1e-4;
    let xi = TestFunction::general(
        3,
        1.0,
        move |x| x[0].exp() * b0.value(norm(x)),
        move |x| {
            let r = norm(x);
            let d = b1.deriv1(r, h);
            let mut g: Vec<f64> = x
                .iter()
                .map(|&xi| if r > 0.0 { d * xi / r } else { 0.0 })
                .collect();
            g[0] += b1.value(r);
            g.iter().map(|v| v * x[0].exp()).collect()
        },
        move |x| {
            let r = norm(x);
            let (v, d1, d2) = (b2.value(r), b2.deriv1(r, h), b2.deriv2(r, h));
            let radial_lap = if r > 0.0 { d2 + 2.0 * d1 / r } else { 3.0 * d2 };
            let cross = if r > 0.0 { 2.0 * d1 * x[0] / r } else { 0.0 };
            x[0].exp() * (v + cross + radial_lap)
        },
    );
    let params = OperatorParams::new(3.0, 0.0, -0.2)?;
    let res = identity_residual(&params, &xi, &spec)?;
    println!(
        "tilted bump, N=3 mu2=-0.2: rel residual={:.1e} ({:?})",
        res.residual, res.path
    );
    Ok(())
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
