//! Weighted Hardy inequality ∫|∇u|²|x|^{-2a} ≥ ((N-2-2a)/2)² ∫u²|x|^{-2a-2}.

use cknkit::quadrature::{
    ckn_inequality_check, ckn_test_battery, near_extremal_ratio, QuadratureSpec,
};

fn main() -> cknkit::Result<()> {
    let spec = QuadratureSpec::default();
    for (n, a) in [(3.0, 0.0), (3.0, 0.4), (4.0, -0.5)] {
        println!("N={n} a={a}");
        for (name, u) in ckn_test_battery() {
            let check = ckn_inequality_check(n, a, &u, &spec)?;
            println!(
                "  {name:<14} ratio {:.6} (constant {:.4})",
                check.ratio, check.constant
            );
        }
        for width in [5.0, 20.0, 60.0] {
            println!(
                "  near-extremal width {width:>4}: ratio {:.6}",
                near_extremal_ratio(n, a, width)
            );
        }
    }
    Ok(())
}
