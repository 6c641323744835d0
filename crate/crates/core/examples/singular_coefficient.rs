//! Recover the singular coefficient k = lim u/Φ of a prescribed solution.

use cknkit::exponents::OperatorParams;
use cknkit::poisson::{green_solve, singular_coefficient, SourceTerm};
use cknkit::quadrature::QuadratureSpec;

fn main() -> cknkit::Result<()> {
    let spec = QuadratureSpec::default();
    for (n, mu1, mu2, k) in [
        (3.0, 0.0, -0.2, 2.5),
        (3.0, 0.0, -0.25, -1.0),
        (5.0, 1.0, 0.5, 0.75),
    ] {
        let params = OperatorParams::new(n, mu1, mu2)?;
        let sol = green_solve(&params, &SourceTerm::constant(1.0), 1.0, k, &spec)?;
        let est = singular_coefficient(&params, &sol.singular_samples(30, 0.5))?;
        println!(
            "N={n} mu1={mu1} mu2={mu2} ({:?}): k = {k}, recovered {:.12}, observed order {:.3}",
            params.regime(),
            est.k,
            est.order
        );
    }
    Ok(())
}
