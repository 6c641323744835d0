//! Radial Poisson problems `Lu = f` on punctured balls.

mod asymptotics;
mod gate;
mod green;
mod source;

pub use asymptotics::{
    comparison_check, singular_coefficient, verify_solution, OrderingReport, SingularCoefficient,
};
pub use gate::{mass_exponent, weighted_l1_gate, GateDecision, GATE_MARGIN};
pub use green::{green_solve, GreenSolution, GridSample, RESONANCE_TOLERANCE};
pub use source::SourceTerm;
