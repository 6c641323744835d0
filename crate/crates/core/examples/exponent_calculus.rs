//! Characteristic exponents, regimes and critical exponents across a few parameter sets.

use cknkit::exponents::{critical_exponents, exponent_data, hardy_reduction, OperatorParams};

fn main() -> cknkit::Result<()> {
    for (n, mu1, mu2) in [
        (3.0, 0.0, -0.2),
        (3.0, 0.0, -0.25),
        (4.0, 0.5, -0.5),
        (5.0, -1.0, 2.0),
    ] {
        let params = OperatorParams::new(n, mu1, mu2)?;
        let data = exponent_data(&params)?;
        let hardy = hardy_reduction(&params)?;
        println!(
            "N={n} mu1={mu1} mu2={mu2}: {:?}, tau- = {:.6}, tau+ = {:.6}, mu~ = {:.6}",
            params.regime(),
            data.tau_minus,
            data.tau_plus,
            hardy.mu_tilde
        );
        match critical_exponents(&params, 0.0) {
            Ok(c) => println!(
                "    p# = {:.6}, q# = {:.6}, measure-corrected q# = {:.6}",
                c.p_sharp, c.q_sharp, c.q_sharp_measure
            ),
            Err(e) => println!("    {e}"),
        }
    }
    match OperatorParams::new(3.0, 0.0, -0.3).and_then(|p| p.exponents()) {
        Ok(_) => unreachable!(),
        Err(e) => println!("N=3 mu1=0 mu2=-0.3: {e}"),
    }
    Ok(())
}
