//! Nonexistence of positive solutions to `Lu ≥ Q u^p` near the origin.

mod bootstrap;
mod certificate;
mod witness;

pub use bootstrap::{
    barrier, bootstrap, initial_constant, log_step_constant, lower_bound_step, Barrier, CaseTag,
    LiouvilleTrace, Step, Termination, INITIAL_BOUND, P_SHARP_TOLERANCE,
};
pub use certificate::{
    check_hypotheses, liouville_verdict, Certificate, CertificateParams, ReplayReport, Verdict,
    REPLAY_TOLERANCE,
};
pub use witness::{numeric_step_witness, witness_trace, WitnessReport, ENDPOINT_SLACK};
