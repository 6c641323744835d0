//! Radial Poisson solves on B_R: closed-form comparison and the weighted L1 gate.

use cknkit::exponents::{indicial, OperatorParams};
use cknkit::poisson::{green_solve, weighted_l1_gate, SourceTerm};
use cknkit::quadrature::QuadratureSpec;

fn main() -> cknkit::Result<()> {
    let spec = QuadratureSpec::default();

    let params = OperatorParams::new(3.0, 0.0, 0.0)?;
    let torsion = green_solve(&params, &SourceTerm::constant(1.0), 1.0, 0.0, &spec)?;
    for r in [0.1, 0.5, 0.9] {
        println!(
            "torsion u({r}) = {:.15} vs (1-r²)/6 = {:.15}",
            torsion.value(r),
            (1.0 - r * r) / 6.0
        );
    }

    let params = OperatorParams::new(4.0, 0.5, -0.5)?;
    let theta = 0.7;
    let sol = green_solve(&params, &SourceTerm::power(1.0, theta), 1.0, 0.0, &spec)?;
    let plus = params.tau_plus()?;
    let cp = indicial(&params, theta + 2.0);
    let exact = |r: f64| (r.powf(theta + 2.0) - r.powf(plus)) / cp;
    let worst = (1..50)
        .map(|i| i as f64 / 100.0)
        .map(|r| ((sol.value(r) - exact(r)) / exact(r)).abs())
        .fold(0.0, f64::max);
    println!("L u = r^0.7 in N=4 mu1=0.5 mu2=-0.5: worst rel error {worst:.1e} on (0, 1/2)");

    let hardy = OperatorParams::new(3.0, 0.0, -0.25)?;
    for theta in [-2.3, -2.7] {
        let gate = weighted_l1_gate(&hardy, &SourceTerm::power(1.0, theta), 1.0, &spec)?;
        println!(
            "Hardy-critical, f = r^{theta}: integrable = {}, mass exponent {:.4}",
            gate.is_integrable(),
            gate.exponent()
        );
        if let Err(e) = green_solve(&hardy, &SourceTerm::power(1.0, theta), 1.0, 0.0, &spec) {
            println!("    {e}");
        }
    }
    Ok(())
}
