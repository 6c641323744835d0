//! Barrier subsolutions and the exponent bootstrap for `Lu ≥ Q u^p`, `Q ≥ q0 |x|^θ`.
//!
//! A positive supersolution on `B_1` satisfies `u ≥ d0 r^{τ+}` on `B_{1/2}`.
//! Each step feeds a bound `u ≥ d_j r^{τ_j}` into the right-hand side,
//! compares with the barrier `w = r^τ - r0^{τ-τ+} r^{τ+}` for
//! `τ = p τ_j + θ + 2`, and returns a bound with the smaller exponent. Once
//! the next exponent would fall to `τ-` or below, the right-hand side has
//! infinite `dγ` mass near the origin and no positive solution can exist.

use serde::{Deserialize, Serialize};

use crate::error::{CknError, Result};
use crate::exponents::{critical_exponents, indicial, CriticalExponents, OperatorParams, Regime};
use crate::profile::RadialProfile;

/// Relative distance to `p#` treated as `p = p#`.
pub const P_SHARP_TOLERANCE: f64 = 1e-12;
/// Constant of the initial bound `u ≥ t1 (r^{τ+} - 1)` on `B_1`.
pub const INITIAL_BOUND: f64 = 1.0;
const MAX_STEPS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "Part1_Supercritical")]
    Part1Supercritical,
    #[serde(rename = "Part2_Bootstrap")]
    Part2Bootstrap,
    #[serde(rename = "Part3_CriticalShift")]
    Part3CriticalShift,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    DivergentMass,
    InadmissibleShift,
    BelowPSharp,
}

/// `w(r) = r^τ - r0^{τ-τ+} r^{τ+}` with `L w = c(τ) r^{τ-2}` and `w(r0) = 0`.
#[derive(Debug, Clone)]
pub struct Barrier {
    pub profile: RadialProfile,
    pub tau: f64,
    pub r0: f64,
    pub c_tau: f64,
    /// `w(r0)`, zero up to rounding.
    pub boundary_value: f64,
    /// `inf_{(0, r0/2]} w/r^τ = 1 - 2^{τ-τ+}`.
    pub inner_ratio: f64,
}

pub fn barrier(params: &OperatorParams, tau: f64, r0: f64) -> Result<Barrier> {
    let (minus, plus) = params.exponents()?;
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(CknError::Domain(format!(
            "barrier radius {r0} must be positive"
        )));
    }
    if !(tau > minus && tau < plus) {
        return Err(CknError::Domain(format!(
            "barrier exponent {tau} outside ({minus}, {plus}) where c(tau) > 0"
        )));
    }
    let scale = r0.powf(tau - plus);
    let w = RadialProfile::linear_combination(
        1.0,
        &RadialProfile::power(tau),
        -scale,
        &RadialProfile::power(plus),
    );
    Ok(Barrier {
        boundary_value: w.value(r0),
        profile: w,
        tau,
        r0,
        c_tau: indicial(params, tau),
        inner_ratio: 1.0 - 2f64.powf(tau - plus),
    })
}

/// Outcome of one bootstrap step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Step {
    /// `u ≥ d_next r^{τ_next}` on the half ball.
    Next { tau_next: f64, d_next: f64 },
    /// `τ_next ∉ (τ-, τ+)`: the caller runs the termination test.
    OutOfRange { tau_next: f64 },
}

#[allow(clippy::too_many_arguments)]
pub fn lower_bound_step(
    params: &OperatorParams,
    theta: f64,
    p: f64,
    q0: f64,
    tau_j: f64,
    d_j: f64,
    r0: f64,
) -> Result<Step> {
    if !(d_j > 0.0) {
        return Err(CknError::Domain(format!(
            "lower-bound constant {d_j} must be positive"
        )));
    }
    let (minus, plus) = params.exponents()?;
    let tau_next = p * tau_j + theta + 2.0;
    if !(tau_next > minus && tau_next < plus) {
        return Ok(Step::OutOfRange { tau_next });
    }
    let b = barrier(params, tau_next, r0)?;
    let d_next = q0 * d_j.powf(p) / b.c_tau * b.inner_ratio;
    Ok(Step::Next { tau_next, d_next })
}

/// `ln d_next = ln q0 + p ln d_j - ln c(τ_next) + ln(1 - 2^{τ_next-τ+})`.
///
/// The constants shrink like `d0^{p^j}` and leave the `f64` range within a
/// few steps when `p` is close to `p#`; the trace carries them in this form.
pub fn log_step_constant(
    params: &OperatorParams,
    p: f64,
    q0: f64,
    tau_next: f64,
    log_d_j: f64,
) -> Result<f64> {
    let plus = params.tau_plus()?;
    Ok(q0.ln() + p * log_d_j - indicial(params, tau_next).ln()
        + (-(2f64.powf(tau_next - plus))).ln_1p())
}

/// `d0 = t1 (1 - 2^{τ+})` from `u ≥ t1(r^{τ+} - 1)` restricted to `B_{1/2}`.
pub fn initial_constant(params: &OperatorParams) -> Result<f64> {
    Ok(INITIAL_BOUND * (1.0 - 2f64.powf(params.tau_plus()?)))
}

/// The complete bootstrap record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleTrace {
    pub n: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub theta: f64,
    pub p: f64,
    pub q0: f64,
    pub critical: CriticalExponents,
    pub case_tag: CaseTag,
    /// For the critical shift, the case the shifted problem falls into.
    pub sub_case: Option<CaseTag>,
    pub tau_sequence: Vec<f64>,
    /// `d_j`, possibly underflowed to 0; `log_d_sequence` is authoritative.
    pub d_sequence: Vec<f64>,
    pub log_d_sequence: Vec<f64>,
    pub sigma0: Option<f64>,
    pub shifted_mu2: Option<f64>,
    pub termination: Termination,
    /// `θ + p τ_last + τ+ - μ1 + N` (in the shifted parameters after a shift);
    /// non-positive at a mass divergence.
    pub witness_exponent: Option<f64>,
}

impl LiouvilleTrace {
    /// `τ_j - τ_{j-1}` for `j ≥ 1`.
    pub fn gaps(&self) -> Vec<f64> {
        self.tau_sequence.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

struct Iteration {
    case: CaseTag,
    taus: Vec<f64>,
    log_ds: Vec<f64>,
    witness: f64,
}

/// Part 1 or Part 2 on parameters with `p > p#`.
fn iterate(
    params: &OperatorParams,
    theta: f64,
    p: f64,
    q0: f64,
    crit: &CriticalExponents,
) -> Result<Iteration> {
    let (minus, plus) = params.exponents()?;
    let log_d0 = initial_constant(params)?.ln();
    let mass = |tau: f64| theta + p * tau + plus - params.mu1() + params.n();
    if p >= crit.q_sharp_measure {
        return Ok(Iteration {
            case: CaseTag::Part1Supercritical,
            taus: vec![plus],
            log_ds: vec![log_d0],
            witness: mass(plus),
        });
    }
    let mut taus = vec![plus];
    let mut log_ds = vec![log_d0];
    for _ in 0..MAX_STEPS {
        let (tau, log_d) = (*taus.last().unwrap(), *log_ds.last().unwrap());
        let tau_next = p * tau + theta + 2.0;
        if !(tau_next > minus && tau_next < plus) {
            return Ok(Iteration {
                case: CaseTag::Part2Bootstrap,
                taus,
                log_ds,
                witness: mass(tau),
            });
        }
        taus.push(tau_next);
        log_ds.push(log_step_constant(params, p, q0, tau_next, log_d)?);
    }
    Err(CknError::NotConverged(format!(
        "bootstrap did not terminate in {MAX_STEPS} steps"
    )))
}

pub fn bootstrap(params: &OperatorParams, theta: f64, p: f64, q0: f64) -> Result<LiouvilleTrace> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(CknError::Domain(format!("p = {p} must be positive")));
    }
    if !(q0 >= 0.0 && q0.is_finite()) {
        return Err(CknError::Domain(format!("q0 = {q0} must be nonnegative")));
    }
    let crit = critical_exponents(params, theta)?;
    let mut trace = LiouvilleTrace {
        n: params.n(),
        mu1: params.mu1(),
        mu2: params.mu2(),
        theta,
        p,
        q0,
        critical: crit,
        case_tag: CaseTag::Inconclusive,
        sub_case: None,
        tau_sequence: vec![params.tau_plus()?],
        d_sequence: vec![initial_constant(params)?],
        log_d_sequence: vec![initial_constant(params)?.ln()],
        sigma0: None,
        shifted_mu2: None,
        termination: Termination::BelowPSharp,
        witness_exponent: None,
    };
    let at_sharp = (p - crit.p_sharp).abs() <= P_SHARP_TOLERANCE * crit.p_sharp.max(1.0);
    if at_sharp {
        trace.case_tag = CaseTag::Part3CriticalShift;
        let d0 = initial_constant(params)?;
        let sigma0 = 0.5 * q0 * d0.powf(p - 1.0);
        let shifted_mu2 = params.mu2() - sigma0;
        trace.sigma0 = Some(sigma0);
        trace.shifted_mu2 = Some(shifted_mu2);
        let shifted = params.with_mu2(shifted_mu2)?;
        if shifted.regime() == Regime::Inadmissible {
            trace.termination = Termination::InadmissibleShift;
            return Ok(trace);
        }
        let shifted_crit = critical_exponents(&shifted, theta)?;
        if !(p > shifted_crit.p_sharp) {
            return Err(CknError::Unresolved(format!(
                "shift sigma0 = {sigma0:e} does not move p# = {p} away from {}",
                shifted_crit.p_sharp
            )));
        }
        let it = iterate(&shifted, theta, p, 0.5 * q0, &shifted_crit)?;
        trace.sub_case = Some(it.case);
        trace.tau_sequence = it.taus;
        trace.d_sequence = it.log_ds.iter().map(|l| l.exp()).collect();
        trace.log_d_sequence = it.log_ds;
        trace.witness_exponent = Some(it.witness);
        trace.termination = Termination::DivergentMass;
        return Ok(trace);
    }
    if p < crit.p_sharp {
        return Ok(trace);
    }
    let it = iterate(params, theta, p, q0, &crit)?;
    trace.case_tag = it.case;
    trace.tau_sequence = it.taus;
    trace.d_sequence = it.log_ds.iter().map(|l| l.exp()).collect();
    trace.log_d_sequence = it.log_ds;
    trace.witness_exponent = Some(it.witness);
    trace.termination = Termination::DivergentMass;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::apply_radial;

    fn params(n: f64, mu1: f64, mu2: f64) -> OperatorParams {
        OperatorParams::new(n, mu1, mu2).unwrap()
    }

    #[test]
    fn barrier_examples() {
        let p = params(3.0, 0.0, 0.0);
        let b = barrier(&p, -0.5, 1.0).unwrap();
        assert_eq!(b.c_tau, 0.25);
        assert_eq!(b.boundary_value, 0.0);
        assert!((b.profile.value(0.25) - 1.0).abs() < 1e-15);
        assert!((b.inner_ratio - (1.0 - 2f64.powf(-0.5))).abs() < 1e-15);
        for r in [0.1, 0.4, 0.9] {
            let lw = apply_radial(&p, &b.profile.values_only(), r).unwrap();
            assert!((lw - 0.25 * r.powf(-2.5)).abs() < 1e-5 * r.powf(-2.5));
        }
        // The infimum of w/r^τ on (0, r0/2] sits at r0/2.
        let b = barrier(&params(3.0, 0.0, -0.2), -0.5, 0.8).unwrap();
        let ratio = |r: f64| b.profile.value(r) / r.powf(-0.5);
        let grid_min = (1..=400)
            .map(|i| ratio(0.4 * i as f64 / 400.0))
            .fold(f64::INFINITY, f64::min);
        assert!((grid_min - b.inner_ratio).abs() < 1e-12);
        assert!(barrier(&p, 0.5, 1.0).is_err());
        assert!(barrier(&p, -1.0, 1.0).is_err());
    }

    #[test]
    fn step_examples() {
        let p = params(3.0, 0.0, -0.2);
        let plus = p.tau_plus().unwrap();
        let Step::Next { tau_next, d_next } =
            lower_bound_step(&p, 0.0, 9.0, 1.0, plus, 1.0, 1.0).unwrap()
        else {
            panic!()
        };
        assert!((tau_next + 0.48754).abs() < 1e-5);
        let Step::Next {
            d_next: doubled, ..
        } = lower_bound_step(&p, 0.0, 9.0, 1.0, plus, 2.0, 1.0).unwrap()
        else {
            panic!()
        };
        assert!((doubled / d_next - 512.0).abs() < 1e-9);
        let Step::Next { d_next: zero, .. } =
            lower_bound_step(&p, 0.0, 9.0, 0.0, plus, 1.0, 1.0).unwrap()
        else {
            panic!()
        };
        assert_eq!(zero, 0.0);
        let log_form = log_step_constant(&p, 9.0, 1.0, tau_next, 0.0).unwrap();
        assert!((log_form.exp() / d_next - 1.0).abs() < 1e-13);
        let out = lower_bound_step(&p, 0.0, 9.0, 1.0, tau_next, d_next, 1.0).unwrap();
        assert!(matches!(out, Step::OutOfRange { tau_next } if (tau_next + 2.3879).abs() < 1e-3));
    }

    #[test]
    fn dispatch() {
        let p = params(3.0, 0.0, -0.2);
        let t = bootstrap(&p, 0.0, 9.0, 1.0).unwrap();
        assert_eq!(t.case_tag, CaseTag::Part2Bootstrap);
        assert_eq!(t.tau_sequence.len(), 2);
        assert!((t.tau_sequence[0] + 0.27639).abs() < 1e-5);
        assert!((t.tau_sequence[1] + 0.48754).abs() < 1e-5);
        assert_eq!(t.termination, Termination::DivergentMass);
        assert!(t.witness_exponent.unwrap() <= 0.0);

        let t = bootstrap(&p, 0.0, 10.0, 1.0).unwrap();
        assert_eq!(t.case_tag, CaseTag::Part1Supercritical);
        assert_eq!(t.tau_sequence.len(), 1);

        let t = bootstrap(&p, 0.0, 5.0, 1.0).unwrap();
        assert_eq!(t.case_tag, CaseTag::Inconclusive);
        assert_eq!(t.termination, Termination::BelowPSharp);

        let err = bootstrap(&params(3.0, 0.0, 0.1), 0.0, 5.0, 1.0).unwrap_err();
        assert!(matches!(err, CknError::NoSerrinExponent(_)));
    }

    #[test]
    fn critical_shift() {
        // μ2 strictly above the Hardy threshold: the shift stays admissible.
        let p = params(3.0, 0.0, -0.2);
        let sharp = critical_exponents(&p, 0.0).unwrap().p_sharp;
        let t = bootstrap(&p, 0.0, sharp, 1.0).unwrap();
        assert_eq!(t.case_tag, CaseTag::Part3CriticalShift);
        assert_eq!(t.termination, Termination::DivergentMass);
        let sigma0 = t.sigma0.unwrap();
        assert!(sigma0 > 0.0);
        let shifted = p.with_mu2(t.shifted_mu2.unwrap()).unwrap();
        assert!(critical_exponents(&shifted, 0.0).unwrap().p_sharp < sharp);
        assert!(t.sub_case.is_some());
        assert_eq!(t.log_d_sequence.len(), t.tau_sequence.len());
        assert!(t.log_d_sequence.windows(2).all(|w| w[1] < w[0]));

        // At the threshold itself any shift leaves the admissible range.
        let p = params(3.0, 0.0, -0.25);
        let t = bootstrap(&p, 0.0, 5.0, 1.0).unwrap();
        assert_eq!(t.case_tag, CaseTag::Part3CriticalShift);
        assert_eq!(t.termination, Termination::InadmissibleShift);
    }

    #[test]
    fn gap_law() {
        let p = params(4.0, 0.5, -0.5);
        let crit = critical_exponents(&p, 0.3).unwrap();
        let q = 0.5 * (crit.p_sharp + crit.q_sharp_measure);
        let t = bootstrap(&p, 0.3, q, 1.0).unwrap();
        let gaps = t.gaps();
        for (j, g) in gaps.iter().enumerate() {
            let expected = q.powi(j as i32) * gaps[0];
            assert!((g - expected).abs() <= 1e-12 * expected.abs());
        }
    }
}
