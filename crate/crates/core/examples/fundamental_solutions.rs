//! Φ and Γ solve LΦ = LΓ = 0 away from the origin: check by finite differences.
//! Residuals are relative to the size `u/r²` of the individual terms.

use cknkit::exponents::OperatorParams;
use cknkit::operator::{apply_radial, gamma, gamma_profile, phi, phi_profile};

fn main() -> cknkit::Result<()> {
    for (n, mu1, mu2) in [(3.0, 0.0, -0.2), (3.0, 0.0, -0.25), (4.0, 0.5, -0.5)] {
        let params = OperatorParams::new(n, mu1, mu2)?;
        println!("N={n} mu1={mu1} mu2={mu2} ({:?})", params.regime());
        let (p, g) = (
            phi_profile(&params)?.values_only(),
            gamma_profile(&params)?.values_only(),
        );
        for r in [0.01, 0.1, 0.5, 0.9] {
            println!(
                "  r={r:<5} phi={:<12.6e} gamma={:<12.6e} L phi={:+.1e} L gamma={:+.1e}",
                phi(&params, r)?,
                gamma(&params, r)?,
                apply_radial(&params, &p, r)? * r * r / phi(&params, r)?,
                apply_radial(&params, &g, r)? * r * r / gamma(&params, r)?
            );
        }
    }
    Ok(())
}
