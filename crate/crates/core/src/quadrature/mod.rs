//! Singular quadrature and the numerical checks built on it.

mod adaptive;
mod ckn;
mod identity;
mod rules;
mod sphere;
mod test_function;

pub use adaptive::{
    integrate_half_line, integrate_interval, integrate_singular, HalfLineResult, QuadratureResult,
    QuadratureSpec,
};
pub use ckn::{
    ckn_inequality_check, ckn_test_battery, near_extremal_profile, near_extremal_ratio, CknCheck,
};
pub use identity::{identity_residual, identity_residual_with, IdentityPath, IdentityResidual};
pub(crate) use rules::gk15;
pub use rules::{compensated_sum, gauss_legendre};
pub use sphere::SphereRule;
pub use test_function::TestFunction;
