//! Nonexistence certificates for Lu ≥ q0 |x|^θ u^p, with replay and a solver witness.

use cknkit::exponents::{critical_exponents, OperatorParams};
use cknkit::liouville::{bootstrap, liouville_verdict, witness_trace, Certificate};

fn main() -> cknkit::Result<()> {
    let params = OperatorParams::new(3.0, 0.0, -0.2)?;
    let sharp = critical_exponents(&params, 0.0)?.p_sharp;
    for p in [5.0, 9.0, 10.0, sharp] {
        let cert = liouville_verdict(&params, 0.0, p, 1.0)?;
        println!(
            "p = {p:.6}: {:?} via {:?} ({:?}), tau = {:?}",
            cert.verdict, cert.case_tag, cert.termination, cert.tau_sequence
        );
    }

    let cert = liouville_verdict(&params, 0.0, 9.0, 1.0)?;
    let json = cert.to_json()?;
    println!(
        "replay of the p = 9 certificate: {:?}",
        Certificate::from_json(&json)?.replay()
    );

    let trace = bootstrap(&params, 0.0, 9.0, 1.0)?;
    for (j, w) in witness_trace(&trace, 1.0)?.iter().enumerate() {
        println!("step {j}: {w:?}");
    }
    Ok(())
}
