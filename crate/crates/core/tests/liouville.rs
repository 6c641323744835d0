use cknkit::exponents::OperatorParams;
use cknkit::liouville::{
    bootstrap, liouville_verdict, witness_trace, CaseTag, Certificate, Termination, Verdict,
};
use sha2::{Digest, Sha256};

/// `c(τ) = -τ(N-2-μ1+τ) + μ2`, written out independently of the library.
fn c(n: f64, mu1: f64, mu2: f64, t: f64) -> f64 {
    -t * (n - 2.0 - mu1 + t) + mu2
}

/// Upper root of `c` by bisection to the right of its vertex.
fn oracle_tau_plus(n: f64, mu1: f64, mu2: f64) -> f64 {
    let mut lo = 0.5 * (2.0 - n + mu1);
    let mut hi = lo + 1.0;
    while c(n, mu1, mu2, hi) > 0.0 {
        hi += 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if c(n, mu1, mu2, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn oracle_tau_minus(n: f64, mu1: f64, mu2: f64) -> f64 {
    (2.0 - n + mu1) - oracle_tau_plus(n, mu1, mu2)
}

#[test]
fn oracle_reference_values() {
    let plus = oracle_tau_plus(3.0, 0.0, -0.2);
    assert!((plus + 0.276393202250021).abs() < 1e-14);
    assert!((9.0 * plus + 2.0 + 0.487538820250189).abs() < 1e-13);
    assert!((1.0 + 2.0 / -plus - 8.23606797749979).abs() < 1e-12);
    assert!((3.0 / -plus - 1.0 - 9.854101966249685).abs() < 1e-12);
}

#[test]
fn sequence_matches_oracle() {
    for &(n, mu1, mu2, theta, p) in &[
        (3.0, 0.0, -0.2, 0.0, 9.0),
        (4.0, 0.5, -0.5, 0.5, 6.5),
        (5.0, 1.0, -0.8, -1.0, 4.0),
        (3.5, -0.5, -0.3, 2.0, 7.0),
    ] {
        let params = OperatorParams::new(n, mu1, mu2).unwrap();
        let trace = bootstrap(&params, theta, p, 1.0).unwrap();
        let (minus, plus) = (oracle_tau_minus(n, mu1, mu2), oracle_tau_plus(n, mu1, mu2));
        let mut expected = vec![plus];
        if trace.case_tag == CaseTag::Part2Bootstrap {
            loop {
                let next = p * expected.last().unwrap() + theta + 2.0;
                if !(next > minus && next < plus) {
                    break;
                }
                expected.push(next);
            }
        }
        assert_eq!(trace.tau_sequence.len(), expected.len(), "{n} {mu1} {mu2}");
        for (a, b) in trace.tau_sequence.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
        }

        // d_{j+1} = q0 d_j^p (1 - 2^{τ_{j+1} - τ+}) / c(τ_{j+1}), d_0 = 1 - 2^{τ+}.
        let mut d = 1.0 - 2f64.powf(plus);
        for (j, &t) in expected.iter().enumerate().skip(1) {
            d = d.powf(p) * (1.0 - 2f64.powf(t - plus)) / c(n, mu1, mu2, t);
            let log_d = trace.log_d_sequence[j];
            assert!((log_d - d.ln()).abs() < 1e-10 * (1.0 + d.ln().abs()));
        }
    }
}

#[test]
fn three_reference_verdicts() {
    let params = OperatorParams::new(3.0, 0.0, -0.2).unwrap();
    let cert = liouville_verdict(&params, 0.0, 9.0, 1.0).unwrap();
    assert_eq!(cert.verdict, Verdict::Nonexistent);
    assert_eq!(cert.case_tag, CaseTag::Part2Bootstrap);
    assert_eq!(cert.tau_sequence.len(), 2);
    assert_eq!(cert.termination, Termination::DivergentMass);

    let cert = liouville_verdict(&params, 0.0, 10.0, 1.0).unwrap();
    assert_eq!(cert.verdict, Verdict::Nonexistent);
    assert_eq!(cert.case_tag, CaseTag::Part1Supercritical);

    let cert = liouville_verdict(&params, 0.0, 5.0, 1.0).unwrap();
    assert_eq!(cert.verdict, Verdict::Inconclusive);
    assert_eq!(cert.termination, Termination::BelowPSharp);
}

#[test]
fn critical_shift_runs_in_shifted_operator() {
    let params = OperatorParams::new(3.0, 0.0, -0.2).unwrap();
    let sharp = 1.0 + 2.0 / -oracle_tau_plus(3.0, 0.0, -0.2);
    let trace = bootstrap(&params, 0.0, sharp, 1.0).unwrap();
    assert_eq!(trace.case_tag, CaseTag::Part3CriticalShift);
    let sigma0 = 0.5 * (1.0 - 2f64.powf(oracle_tau_plus(3.0, 0.0, -0.2))).powf(sharp - 1.0);
    assert!((trace.sigma0.unwrap() - sigma0).abs() < 1e-12 * sigma0);
    let shifted_plus = oracle_tau_plus(3.0, 0.0, -0.2 - sigma0);
    assert!((trace.tau_sequence[0] - shifted_plus).abs() < 1e-12);
    assert_eq!(trace.termination, Termination::DivergentMass);
}

#[test]
fn certificate_hash_is_sha256_of_the_rest() {
    let params = OperatorParams::new(4.0, 0.5, -0.5).unwrap();
    let cert = liouville_verdict(&params, 0.5, 6.5, 2.0).unwrap();
    let json = cert.to_json().unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&json).unwrap();
    let hash = value
        .as_object_mut()
        .unwrap()
        .remove("replay_hash")
        .unwrap();
    let body = cknkit::output::to_canonical_json(&value).unwrap();
    let digest: String = Sha256::digest(body.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    assert_eq!(hash.as_str().unwrap(), digest);

    let back = Certificate::from_json(&json).unwrap();
    assert_eq!(back.to_json().unwrap(), json);
    assert!(back.replay().ok);
}

#[test]
fn tampered_sequence_fails_replay() {
    let params = OperatorParams::new(3.0, 0.0, -0.2).unwrap();
    let mut cert = liouville_verdict(&params, 0.0, 9.0, 1.0).unwrap();
    cert.tau_sequence[1] += 1e-6;
    cert.replay_hash = cert.compute_hash().unwrap();
    let report = cert.replay();
    assert!(!report.ok);
    assert!(!report.failures.is_empty());
}

#[test]
fn every_step_is_witnessed() {
    let params = OperatorParams::new(4.0, 0.5, -0.5).unwrap();
    let trace = bootstrap(&params, 0.5, 6.5, 2.0).unwrap();
    let reports = witness_trace(&trace, 1.0).unwrap();
    assert_eq!(reports.len(), trace.tau_sequence.len());
    assert!(reports.iter().all(|r| r.holds()));
}
