//! Certificates: a serialized trace plus enough data to re-check it by hand.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::bootstrap::{
    bootstrap, CaseTag, LiouvilleTrace, Termination, INITIAL_BOUND, P_SHARP_TOLERANCE,
};
use crate::error::{CknError, Result};
use crate::exponents::{critical_exponents, indicial, OperatorParams, Regime};
use crate::output::to_canonical_json;

/// Relative tolerance for replayed quantities.
pub const REPLAY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Nonexistent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateParams {
    #[serde(rename = "N")]
    pub n: f64,
    pub mu1: f64,
    pub mu2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub params: CertificateParams,
    pub theta: f64,
    pub p: f64,
    pub q0: f64,
    pub verdict: Verdict,
    pub case_tag: CaseTag,
    pub sub_case: Option<CaseTag>,
    pub tau_minus: f64,
    pub tau_plus: f64,
    pub p_sharp: f64,
    pub q_sharp: f64,
    pub q_sharp_measure: f64,
    pub tau_sequence: Vec<f64>,
    pub d_sequence: Vec<f64>,
    pub log_d_sequence: Vec<f64>,
    pub sigma0: Option<f64>,
    pub shifted_mu2: Option<f64>,
    pub termination: Termination,
    pub witness_exponent: Option<f64>,
    pub replay_hash: String,
}

/// Outcome of [`Certificate::replay`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub ok: bool,
    pub failures: Vec<String>,
}

/// Checks the standing hypotheses: `N ≥ 3`, `μ1 < N-2`,
/// `-(N-2-μ1)²/4 ≤ μ2 < 0`, `θ > -2`, `q0 > 0`.
pub fn check_hypotheses(params: &OperatorParams, theta: f64, q0: f64) -> Result<()> {
    let (n, mu1, mu2) = (params.n(), params.mu1(), params.mu2());
    if n < 3.0 {
        return Err(CknError::Hypothesis(format!("N >= 3 fails (N = {n})")));
    }
    if mu1 >= n - 2.0 {
        return Err(CknError::Hypothesis(format!(
            "mu1 < N - 2 fails (mu1 = {mu1}, N = {n})"
        )));
    }
    if mu2 >= 0.0 {
        return Err(CknError::Hypothesis(format!("mu2 < 0 fails (mu2 = {mu2})")));
    }
    if params.regime() == Regime::Inadmissible {
        let bound = -(n - 2.0 - mu1).powi(2) / 4.0;
        return Err(CknError::Hypothesis(format!(
            "mu2 >= -(N-2-mu1)^2/4 = {bound} fails (mu2 = {mu2})"
        )));
    }
    if !(theta > -2.0) {
        return Err(CknError::Hypothesis(format!(
            "theta > -2 fails (theta = {theta})"
        )));
    }
    if !(q0 > 0.0 && q0.is_finite()) {
        return Err(CknError::Hypothesis(format!("q0 > 0 fails (q0 = {q0})")));
    }
    Ok(())
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Certificate {
    fn from_trace(trace: &LiouvilleTrace, params: &OperatorParams) -> Result<Self> {
        let (tau_minus, tau_plus) = params.exponents()?;
        let verdict = match trace.case_tag {
            CaseTag::Inconclusive => Verdict::Inconclusive,
            _ => Verdict::Nonexistent,
        };
        let mut cert = Certificate {
            params: CertificateParams {
                n: trace.n,
                mu1: trace.mu1,
                mu2: trace.mu2,
            },
            theta: trace.theta,
            p: trace.p,
            q0: trace.q0,
            verdict,
            case_tag: trace.case_tag,
            sub_case: trace.sub_case,
            tau_minus,
            tau_plus,
            p_sharp: trace.critical.p_sharp,
            q_sharp: trace.critical.q_sharp,
            q_sharp_measure: trace.critical.q_sharp_measure,
            tau_sequence: trace.tau_sequence.clone(),
            d_sequence: trace.d_sequence.clone(),
            log_d_sequence: trace.log_d_sequence.clone(),
            sigma0: trace.sigma0,
            shifted_mu2: trace.shifted_mu2,
            termination: trace.termination,
            witness_exponent: trace.witness_exponent,
            replay_hash: String::new(),
        };
        cert.replay_hash = cert.compute_hash()?;
        Ok(cert)
    }

    /// SHA-256 of the canonical JSON with `replay_hash` removed.
    pub fn compute_hash(&self) -> Result<String> {
        let mut tree = serde_json::to_value(self).map_err(|e| CknError::Io(e.to_string()))?;
        if let Some(map) = tree.as_object_mut() {
            map.remove("replay_hash");
        }
        Ok(sha256_hex(to_canonical_json(&tree)?.as_bytes()))
    }

    pub fn to_json(&self) -> Result<String> {
        to_canonical_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| CknError::Config(format!("unreadable certificate: {e}")))
    }

    /// Re-derives every recorded quantity from the exponent calculus alone
    /// and checks the dispatch, the recurrences and the divergence witness.
    pub fn replay(&self) -> ReplayReport {
        let mut failures = Vec::new();
        if let Err(e) = self.replay_into(&mut failures) {
            failures.push(format!("replay aborted: {e}"));
        }
        ReplayReport {
            ok: failures.is_empty(),
            failures,
        }
    }

    fn replay_into(&self, failures: &mut Vec<String>) -> Result<()> {
        let close =
            |a: f64, b: f64| (a - b).abs() <= REPLAY_TOLERANCE * a.abs().max(b.abs()).max(1.0);
        let mut check = |ok: bool, what: &str| {
            if !ok {
                failures.push(what.to_string());
            }
        };
        match self.compute_hash() {
            Ok(h) => check(
                h == self.replay_hash,
                "replay_hash does not match the content",
            ),
            Err(_) => check(false, "content cannot be hashed"),
        }
        let CertificateParams { n, mu1, mu2 } = self.params;
        let params = OperatorParams::new(n, mu1, mu2)?;
        let (minus, plus) = params.exponents()?;
        check(close(minus, self.tau_minus), "tau_minus");
        check(close(plus, self.tau_plus), "tau_plus");
        let crit = critical_exponents(&params, self.theta)?;
        check(close(crit.p_sharp, self.p_sharp), "p_sharp");
        check(close(crit.q_sharp, self.q_sharp), "q_sharp");
        check(
            close(crit.q_sharp_measure, self.q_sharp_measure),
            "q_sharp_measure",
        );

        let p = self.p;
        let at_sharp = (p - crit.p_sharp).abs() <= P_SHARP_TOLERANCE * crit.p_sharp.max(1.0);
        let expected_case = if at_sharp {
            CaseTag::Part3CriticalShift
        } else if p < crit.p_sharp {
            CaseTag::Inconclusive
        } else if p >= crit.q_sharp_measure {
            CaseTag::Part1Supercritical
        } else {
            CaseTag::Part2Bootstrap
        };
        check(
            self.case_tag == expected_case,
            "case_tag does not follow from p and the critical exponents",
        );
        check(
            (self.verdict == Verdict::Inconclusive) == (self.case_tag == CaseTag::Inconclusive),
            "verdict inconsistent with case_tag",
        );
        if self.case_tag == CaseTag::Inconclusive {
            check(
                self.termination == Termination::BelowPSharp,
                "Inconclusive must end BelowPSharp",
            );
            return Ok(());
        }

        // The parameters the iteration actually ran on.
        let (run, q_run) = if self.case_tag == CaseTag::Part3CriticalShift {
            let d0 = INITIAL_BOUND * (1.0 - 2f64.powf(plus));
            let sigma0 = 0.5 * self.q0 * d0.powf(p - 1.0);
            check(self.sigma0.is_some_and(|s| close(s, sigma0)), "sigma0");
            check(
                self.shifted_mu2.is_some_and(|m| close(m, mu2 - sigma0)),
                "shifted_mu2",
            );
            let shifted = params.with_mu2(mu2 - sigma0)?;
            if shifted.regime() == Regime::Inadmissible {
                check(
                    self.termination == Termination::InadmissibleShift,
                    "shift is inadmissible",
                );
                return Ok(());
            }
            let shifted_crit = critical_exponents(&shifted, self.theta)?;
            check(
                shifted_crit.p_sharp < crit.p_sharp,
                "shift must lower p_sharp",
            );
            let sub = if p >= shifted_crit.q_sharp_measure {
                CaseTag::Part1Supercritical
            } else {
                CaseTag::Part2Bootstrap
            };
            check(self.sub_case == Some(sub), "sub_case");
            (shifted, 0.5 * self.q0)
        } else {
            (params, self.q0)
        };
        check(
            self.termination == Termination::DivergentMass,
            "termination must be DivergentMass",
        );
        let (run_minus, run_plus) = run.exponents()?;
        let taus = &self.tau_sequence;
        let logs = &self.log_d_sequence;
        if taus.is_empty() || taus.len() != logs.len() || taus.len() != self.d_sequence.len() {
            check(
                false,
                "tau, d and log d sequences must be nonempty and of equal length",
            );
            return Ok(());
        }
        check(close(taus[0], run_plus), "tau_0 must equal tau_plus");
        check(
            close(logs[0], (INITIAL_BOUND * (1.0 - 2f64.powf(run_plus))).ln()),
            "d_0",
        );
        for j in 1..taus.len() {
            let t = p * taus[j - 1] + self.theta + 2.0;
            check(close(taus[j], t), &format!("tau_{j} recurrence"));
            check(
                t > run_minus && t < run_plus,
                &format!("tau_{j} outside (tau_minus, tau_plus)"),
            );
            let c = indicial(&run, t);
            let log_d =
                q_run.ln() + p * logs[j - 1] - c.ln() + (-(2f64.powf(t - run_plus))).ln_1p();
            check(close(logs[j], log_d), &format!("d_{j} recurrence"));
        }
        for (j, (d, l)) in self.d_sequence.iter().zip(logs).enumerate() {
            check(*d == l.exp(), &format!("d_{j} differs from exp(log d_{j})"));
        }
        let last = *taus.last().unwrap();
        let next = p * last + self.theta + 2.0;
        let witness = self.theta + p * last + run_plus - run.mu1() + run.n();
        check(
            self.witness_exponent.is_some_and(|w| close(w, witness)),
            "witness_exponent",
        );
        check(
            witness <= REPLAY_TOLERANCE,
            "witness exponent must be non-positive",
        );
        if taus.len() > 1 {
            check(
                next <= run_minus + REPLAY_TOLERANCE,
                "iteration stopped before reaching tau_minus",
            );
        }
        Ok(())
    }
}

/// Runs the bootstrap under the standing hypotheses and wraps the result.
pub fn liouville_verdict(
    params: &OperatorParams,
    theta: f64,
    p: f64,
    q0: f64,
) -> Result<Certificate> {
    check_hypotheses(params, theta, q0)?;
    let trace = bootstrap(params, theta, p, q0)?;
    Certificate::from_trace(&trace, params)
}
