use std::env;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{RunConfig, SourceConfig, TestFunctionKind};
use crate::error::{CknError, Result};
use crate::exponents::{
    critical_exponents, exponent_data, hardy_reduction, indicial, OperatorParams, Regime,
    NOTE_HARDY_SHIFT, NOTE_LOG_FORM, NOTE_Q_SHARP,
};
use crate::liouville::{liouville_verdict, Verdict};
use crate::operator::{
    apply_power_log, apply_radial, gamma, gamma_profile, phi, phi_profile, NOTE_POWER_LOG,
};
use crate::output::{to_csv, Cell};
use crate::poisson::{
    green_solve, singular_coefficient, weighted_l1_gate, GateDecision, SourceTerm,
};
use crate::profile::RadialProfile;
use crate::quadrature::{
    ckn_inequality_check, ckn_test_battery, identity_residual, near_extremal_profile,
    near_extremal_ratio, TestFunction,
};

/// Environment variable capping the sweep worker count.
pub const THREADS_ENV: &str = "CKNKIT_THREADS";
/// Relative residual accepted by `verify-identity`.
pub const IDENTITY_TOLERANCE: f64 = 1e-6;
/// Ratio floor for the CKN battery, allowing for quadrature error.
pub const CKN_RATIO_FLOOR: f64 = 1.0 - 1e-9;
const EXTREMAL_MAX_LEVELS: usize = 200;
const MAX_EXTREMAL_WIDTH: f64 = 100.0;
const SINGULAR_SAMPLES: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: RunConfig,
    pub results: Value,
    pub discrepancy_notes: Vec<String>,
    pub version: String,
}

/// A report plus an optional CSV table and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub csv: Option<String>,
    pub exit_code: i32,
}

fn outcome(command: &str, config: &RunConfig, results: Value, notes: &[&str]) -> Outcome {
    Outcome {
        report: Report {
            command: command.to_string(),
            inputs: config.clone(),
            results,
            discrepancy_notes: notes.iter().map(|s| s.to_string()).collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        csv: None,
        exit_code: 0,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    // Non-finite floats are the only failure mode; they map to null.
    serde_json::to_value(v).unwrap_or(Value::Null)
}

pub fn cmd_exponents(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let params = config.single_params()?;
    let data = exponent_data(&params)?;
    let hardy = hardy_reduction(&params)?;
    let (red_minus, red_plus) = hardy.reduced.exponents()?;
    let critical = match critical_exponents(&params, config.theta) {
        Ok(c) => to_value(&c),
        Err(e) => json!({ "unavailable": e.to_string() }),
    };
    let results = json!({
        "regime": params.regime(),
        "exponents": data,
        "indicial_at_roots": [indicial(&params, data.tau_minus), indicial(&params, data.tau_plus)],
        "critical_exponents": critical,
        "hardy_reduction": {
            "mu_tilde": hardy.mu_tilde,
            "exponent_shift": hardy.exponent_shift,
            "tau_minus": red_minus,
            "tau_plus": red_plus,
        },
    });
    Ok(outcome(
        "exponents",
        config,
        results,
        &[NOTE_HARDY_SHIFT, NOTE_Q_SHARP],
    ))
}

pub fn cmd_fundamental(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let params = config.single_params()?;
    let data = exponent_data(&params)?;
    // Finite differences on value-only profiles, as a check of the closed forms.
    let phi_fd = phi_profile(&params)?.values_only();
    let gamma_fd = gamma_profile(&params)?.values_only();
    let mut samples = Vec::new();
    let mut rows = Vec::new();
    for &r in &config.radii {
        let (f, g) = (phi(&params, r)?, gamma(&params, r)?);
        let (lf, lg) = (
            apply_radial(&params, &phi_fd, r)?,
            apply_radial(&params, &gamma_fd, r)?,
        );
        samples.push(json!({ "r": r, "phi": f, "gamma": g, "l_phi": lf, "l_gamma": lg }));
        rows.push(vec![r.into(), f.into(), g.into(), lf.into(), lg.into()]);
    }
    let mut notes = Vec::new();
    let mut results = json!({
        "regime": params.regime(),
        "tau_minus": data.tau_minus,
        "tau_plus": data.tau_plus,
        "c_const": data.c_const,
        "samples": samples,
    });
    if params.regime() == Regime::Critical {
        let action = apply_power_log(&params, data.tau_minus);
        results["power_log_action"] = json!({
            "log_coefficient": action.coeff_log,
            "plain_coefficient": action.coeff_plain,
        });
        notes.push(NOTE_POWER_LOG);
    }
    if params.mu2() == 0.0 {
        notes.push(NOTE_LOG_FORM);
    }
    let mut out = outcome("fundamental", config, results, &notes);
    out.csv = Some(to_csv(&["r", "phi", "gamma", "l_phi", "l_gamma"], &rows)?);
    Ok(out)
}

fn build_test_function(
    kind: TestFunctionKind,
    radius: f64,
    params: &OperatorParams,
) -> Result<TestFunction> {
    let dim = params
        .integer_dimension()
        .unwrap_or(params.n().round().max(2.0) as usize);
    Ok(match kind {
        TestFunctionKind::SmoothBump => TestFunction::smooth_bump(radius, dim),
        TestFunctionKind::PolyBump => TestFunction::poly_bump(radius, dim),
        TestFunctionKind::Tilted => {
            if params.integer_dimension().is_none() {
                return Err(CknError::Config(
                    "the tilted test function needs an integer N".into(),
                ));
            }
            let mut c = vec![0.0; dim];
            c[0] = 0.5;
            TestFunction::smooth_bump(radius, dim).times_affine(1.0, &c)
        }
        TestFunctionKind::Annulus => {
            let outer = RadialProfile::smooth_bump(radius);
            let inner = RadialProfile::smooth_bump(0.5 * radius);
            let scale = outer.value(0.0) / inner.value(0.0);
            let profile =
                RadialProfile::linear_combination(1.0, &outer, -scale, &inner).with_support(radius);
            TestFunction::radial(profile, dim)
        }
    })
}

pub fn cmd_verify_identity(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let params = config.single_params()?;
    let xi = build_test_function(config.test_function, config.domain_radius, &params)?;
    let res = identity_residual(&params, &xi, &config.quadrature)?;
    let tolerance = IDENTITY_TOLERANCE * res.expected.abs().max(1.0);
    let within = res.residual.abs() <= tolerance;
    let results = json!({
        "regime": params.regime(),
        "identity": res,
        "tolerance": tolerance,
        "within_tolerance": within,
    });
    let notes: &[&str] = if params.regime() == Regime::Critical {
        &[NOTE_POWER_LOG]
    } else {
        &[]
    };
    let mut out = outcome("verify-identity", config, results, notes);
    if !res.converged || !within {
        out.exit_code = 3;
    }
    Ok(out)
}

pub fn cmd_ckn_check(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let n = config.n;
    let a = match config.a {
        Some(a) => a,
        None => 0.5 * config.mu1.single("mu1")?,
    };
    let spec = config.quadrature;
    let mut battery = Vec::new();
    let mut min_ratio = f64::INFINITY;
    let mut failures = 0usize;
    for (name, u) in ckn_test_battery() {
        match ckn_inequality_check(n, a, &u, &spec) {
            Ok(c) => {
                min_ratio = min_ratio.min(c.ratio);
                battery
                    .push(json!({ "name": name, "check": c, "holds": c.ratio >= CKN_RATIO_FLOOR }));
            }
            Err(e @ CknError::Domain(_)) | Err(e @ CknError::Dimension(_)) => return Err(e),
            Err(e) => {
                failures += 1;
                battery.push(json!({ "name": name, "error": e.to_string() }));
            }
        }
    }
    let alpha = 0.5 * (n - 2.0 - 2.0 * a);
    let width = config.extremal_width.unwrap_or_else(|| {
        (std::f64::consts::PI / (alpha * 0.03f64.sqrt())).min(MAX_EXTREMAL_WIDTH)
    });
    let extremal = ckn_inequality_check(
        n,
        a,
        &near_extremal_profile(n, a, width),
        &spec.with_max_levels(EXTREMAL_MAX_LEVELS),
    );
    let extremal = match extremal {
        Ok(c) => {
            json!({ "width": width, "check": c, "expected_ratio": near_extremal_ratio(n, a, width) })
        }
        Err(e) => {
            failures += 1;
            json!({ "width": width, "error": e.to_string() })
        }
    };
    let results = json!({
        "N": n,
        "a": a,
        "constant": (0.5 * (n - 2.0 - 2.0 * a)).powi(2),
        "battery": battery,
        "min_ratio": min_ratio,
        "near_extremal": extremal,
    });
    let mut out = outcome("ckn-check", config, results, &[]);
    if failures > 0 {
        out.exit_code = 3;
    }
    Ok(out)
}

fn tabulated_source(points: &[(f64, f64)], theta: f64) -> Result<SourceTerm> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.len() < 2 || pts.iter().any(|p| !(p.0 > 0.0) || !p.1.is_finite()) {
        return Err(CknError::Config(
            "a source table needs two or more points with r > 0".into(),
        ));
    }
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(CknError::Config(
            "source table radii must be distinct".into(),
        ));
    }
    let profile = RadialProfile::new(move |r| {
        let (r0, f0) = pts[0];
        if r <= r0 {
            return f0 * (r / r0).powf(theta);
        }
        let i = pts.partition_point(|p| p.0 < r);
        if i == pts.len() {
            return pts[i - 1].1;
        }
        let ((ra, fa), (rb, fb)) = (pts[i - 1], pts[i]);
        let t = (r / ra).ln() / (rb / ra).ln();
        fa + t * (fb - fa)
    });
    Ok(SourceTerm::new(profile, theta))
}

pub fn cmd_poisson(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let params = config.single_params()?;
    let radius = config.domain_radius;
    let source = match &config.source {
        SourceConfig::Power { coeff } => SourceTerm::power(*coeff, config.theta),
        SourceConfig::Table { points } => tabulated_source(points, config.theta)?,
    };
    let notes: &[&str] = if params.regime() == Regime::Critical {
        &[NOTE_POWER_LOG]
    } else {
        &[]
    };
    let gate = weighted_l1_gate(&params, &source, radius, &config.quadrature)?;
    if let GateDecision::Divergent { .. } = gate {
        let results = json!({
            "gate": gate,
            "finding": "nonexistence: the source is not in L1(dγ), so no nonnegative solution exists",
        });
        return Ok(outcome("poisson", config, results, notes));
    }
    let sol = green_solve(&params, &source, radius, config.k, &config.quadrature)?;
    let mut max_abs = 0.0f64;
    let mut max_scaled = 0.0f64;
    for g in &sol.grid {
        max_abs = max_abs.max(g.residual.abs());
        let scale = source.value(g.r).abs() + g.u.abs() / (g.r * g.r) + f64::MIN_POSITIVE;
        max_scaled = max_scaled.max(g.residual.abs() / scale);
    }
    let estimate = singular_coefficient(&params, &sol.singular_samples(SINGULAR_SAMPLES, 0.5));
    let mut exit_code = 0;
    let k_report = match estimate {
        Ok(est) => {
            json!({ "k_estimate": est.k, "k_error": (est.k - config.k).abs(), "order": est.order })
        }
        Err(e) => {
            exit_code = e.exit_code();
            json!({ "error": e.to_string() })
        }
    };
    let results = json!({
        "gate": gate,
        "regime": sol.regime,
        "resonant": sol.resonant,
        "k": sol.k,
        "boundary_coeff": sol.boundary_coeff,
        "singular_coefficient": k_report,
        "max_abs_residual": max_abs,
        "max_scaled_residual": max_scaled,
    });
    let rows: Vec<Vec<Cell>> = sol
        .grid
        .iter()
        .map(|g| vec![g.r.into(), g.u.into(), g.residual.into()])
        .collect();
    let mut out = outcome("poisson", config, results, notes);
    out.csv = Some(to_csv(&["r", "u", "residual"], &rows)?);
    out.exit_code = exit_code;
    Ok(out)
}

pub fn cmd_liouville(config: &RunConfig) -> Result<Outcome> {
    config.validate()?;
    let params = config.single_params()?;
    let p = config.p.single("p")?;
    let cert = liouville_verdict(&params, config.theta, p, config.q0)?;
    let replay = cert.replay();
    let results = json!({ "certificate": cert, "replay": replay });
    Ok(outcome("liouville", config, results, &[NOTE_Q_SHARP]))
}

/// One row of the phase map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub mu1: f64,
    pub mu2: f64,
    pub theta: f64,
    pub p: f64,
    pub p_sharp: f64,
    pub q_sharp: f64,
    pub q_sharp_measure: f64,
    pub verdict: String,
    pub case_tag: String,
    pub trace_len: usize,
    pub error: String,
}

fn sweep_cell(n: f64, mu1: f64, mu2: f64, theta: f64, p: f64, q0: f64) -> SweepRow {
    let mut row = SweepRow {
        mu1,
        mu2,
        theta,
        p,
        p_sharp: f64::NAN,
        q_sharp: f64::NAN,
        q_sharp_measure: f64::NAN,
        verdict: "Error".into(),
        case_tag: String::new(),
        trace_len: 0,
        error: String::new(),
    };
    let result = OperatorParams::new(n, mu1, mu2).and_then(|params| {
        if let Ok(c) = critical_exponents(&params, theta) {
            row.p_sharp = c.p_sharp;
            row.q_sharp = c.q_sharp;
            row.q_sharp_measure = c.q_sharp_measure;
        }
        liouville_verdict(&params, theta, p, q0)
    });
    match result {
        Ok(cert) => {
            row.verdict = match cert.verdict {
                Verdict::Nonexistent => "Nonexistent".into(),
                Verdict::Inconclusive => "Inconclusive".into(),
            };
            row.case_tag = to_value(&cert.case_tag)
                .as_str()
                .unwrap_or_default()
                .to_string();
            row.trace_len = cert.tau_sequence.len();
        }
        Err(e) => row.error = e.to_string(),
    }
    row
}

/// Worker count from `CKNKIT_THREADS`, or `None` for the rayon default.
pub fn threads_from_env() -> Result<Option<usize>> {
    match env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(CknError::Config(format!(
                "{THREADS_ENV}={s:?} is not a positive integer"
            ))),
            Ok(n) => Ok(Some(n)),
        },
    }
}

pub fn cmd_sweep(config: &RunConfig) -> Result<Outcome> {
    cmd_sweep_with_threads(config, threads_from_env()?)
}

/// Rows are ordered by `μ1`, then `μ2`, then `p`, whatever the worker count.
pub fn cmd_sweep_with_threads(config: &RunConfig, threads: Option<usize>) -> Result<Outcome> {
    config.validate()?;
    let mut cells = Vec::new();
    for mu1 in config.mu1.values() {
        for mu2 in config.mu2.values() {
            for p in config.p.values() {
                cells.push((mu1, mu2, p));
            }
        }
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CknError::Config(format!("cannot start worker pool: {e}")))?;
    let (n, theta, q0) = (config.n, config.theta, config.q0);
    let rows: Vec<SweepRow> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(mu1, mu2, p)| sweep_cell(n, mu1, mu2, theta, p, q0))
            .collect()
    });
    let table: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| {
            vec![
                r.mu1.into(),
                r.mu2.into(),
                r.theta.into(),
                r.p.into(),
                r.p_sharp.into(),
                r.q_sharp.into(),
                r.q_sharp_measure.into(),
                r.verdict.clone().into(),
                r.case_tag.clone().into(),
                r.trace_len.into(),
                r.error.clone().into(),
            ]
        })
        .collect();
    let csv = to_csv(
        &[
            "mu1",
            "mu2",
            "theta",
            "p",
            "p_sharp",
            "q_sharp",
            "q_sharp_measure",
            "verdict",
            "case_tag",
            "trace_len",
            "error",
        ],
        &table,
    )?;
    let count = |v: &str| rows.iter().filter(|r| r.verdict == v).count();
    let results = json!({
        "cells": rows.len(),
        "nonexistent": count("Nonexistent"),
        "inconclusive": count("Inconclusive"),
        "errors": count("Error"),
        "rows": rows,
    });
    let mut out = outcome("sweep", config, results, &[NOTE_Q_SHARP]);
    out.csv = Some(csv);
    Ok(out)
}
