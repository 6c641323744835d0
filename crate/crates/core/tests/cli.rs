use std::process::{Command, Output};

use serde_json::Value;

fn cknkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cknkit"))
        .args(args)
        .env_remove("CKNKIT_THREADS")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn exponents_report() {
    let v = json(&cknkit(&[
        "exponents",
        "--N",
        "3",
        "--mu1",
        "0",
        "--mu2",
        "-0.2",
    ]));
    let e = &v["results"]["exponents"];
    assert!((e["tau_plus"].as_f64().unwrap() + 0.276393202250021).abs() < 1e-12);
    assert_eq!(v["results"]["regime"], "Subcritical");
    assert!(
        (v["results"]["critical_exponents"]["p_sharp"]
            .as_f64()
            .unwrap()
            - 8.23606797749979)
            .abs()
            < 1e-12
    );
}

#[test]
fn inadmissible_input_exits_2() {
    let out = cknkit(&["exponents", "--N", "3", "--mu1", "0", "--mu2", "-0.3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn bad_threads_exits_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_cknkit"))
        .args(["sweep", "--mu2", "-0.2", "--p", "9"])
        .env("CKNKIT_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn poisson_torsion_and_finding() {
    let v = json(&cknkit(&[
        "poisson", "--N", "3", "--mu1", "0", "--mu2", "0", "--theta", "0",
    ]));
    assert!(v["results"]["max_abs_residual"].as_f64().unwrap() < 1e-10);

    let out = cknkit(&[
        "poisson", "--N", "3", "--mu1", "0", "--mu2", "-0.25", "--theta", "-2.7",
    ]);
    let v = json(&out);
    assert_eq!(v["results"]["gate"]["decision"], "Divergent");
    assert!(v["results"]["finding"]
        .as_str()
        .unwrap()
        .contains("no nonnegative solution"));
}

#[test]
fn poisson_recovers_k() {
    let v = json(&cknkit(&[
        "poisson", "--N", "3", "--mu1", "0", "--mu2", "-0.2", "--k", "2.5",
    ]));
    let k = v["results"]["singular_coefficient"]["k_estimate"]
        .as_f64()
        .unwrap();
    assert!((k - 2.5).abs() < 1e-8);
}

#[test]
fn liouville_examples() {
    let base = [
        "liouville",
        "--N",
        "3",
        "--mu1",
        "0",
        "--mu2",
        "-0.2",
        "--p",
    ];
    for (p, verdict, tag) in [
        ("9", "Nonexistent", "Part2_Bootstrap"),
        ("10", "Nonexistent", "Part1_Supercritical"),
        ("5", "Inconclusive", "Inconclusive"),
    ] {
        let mut args = base.to_vec();
        args.push(p);
        let v = json(&cknkit(&args));
        let cert = &v["results"]["certificate"];
        assert_eq!(cert["verdict"], verdict);
        assert_eq!(cert["case_tag"], tag);
        assert_eq!(v["results"]["replay"]["ok"], true);
    }
}

#[test]
fn liouville_hypothesis_violation_exits_2() {
    let out = cknkit(&[
        "liouville",
        "--N",
        "3",
        "--mu1",
        "0",
        "--mu2",
        "0.1",
        "--p",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_cell_matches_liouville() {
    let v = json(&cknkit(&[
        "sweep",
        "--N",
        "3",
        "--mu1",
        "0",
        "--mu2",
        "-0.2,-0.3",
        "--p",
        "9",
    ]));
    let rows = v["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["verdict"], "Nonexistent");
    assert_eq!(rows[0]["case_tag"], "Part2_Bootstrap");
    assert_eq!(rows[0]["trace_len"], 2);
    assert_eq!(rows[1]["verdict"], "Error");
    assert!(!rows[1]["error"].as_str().unwrap().is_empty());
}

#[test]
fn sweep_is_deterministic_across_threads() {
    let args = [
        "sweep",
        "--N",
        "3",
        "--mu1",
        "-0.5:0.5:5",
        "--mu2",
        "-0.24:-0.01:6",
        "--p",
        "4:12:5",
        "--format",
        "csv",
    ];
    let mut outputs = Vec::new();
    for threads in ["1", "3", "8"] {
        let out = Command::new(env!("CARGO_BIN_EXE_cknkit"))
            .args(args)
            .env("CKNKIT_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        outputs.push(out.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert_eq!(text.lines().count(), 1 + 5 * 6 * 5);
    assert!(text.starts_with("mu1,mu2,"));
}

#[test]
fn out_dir_and_config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        r#"{"N": 4, "mu1": 0.5, "mu2": -0.5, "theta": 0.5, "p": 6.5, "q0": 2}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = cknkit(&[
        "liouville",
        "--config",
        config.to_str().unwrap(),
        "--p",
        "3",
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "json,csv",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(out_dir.join("liouville.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["inputs"]["N"].as_f64(), Some(4.0));
    assert_eq!(v["inputs"]["p"].as_f64(), Some(3.0));
    assert_eq!(v["results"]["certificate"]["verdict"], "Inconclusive");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"N": 3, "mu3": 1}"#).unwrap();
    let out = cknkit(&["exponents", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fundamental_csv() {
    let out = cknkit(&[
        "fundamental",
        "--N",
        "3",
        "--mu1",
        "0",
        "--mu2",
        "-0.2",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("r,phi,gamma,l_phi,l_gamma\n"));
}

#[test]
fn identity_and_ckn_commands_succeed() {
    for cmd in ["verify-identity", "ckn-check"] {
        let v = json(&cknkit(&[
            cmd, "--N", "3", "--mu1", "0.4", "--mu2", "-0.05",
        ]));
        assert_eq!(v["command"], cmd);
    }
}

#[test]
fn sweep_boundary_tracks_p_sharp() {
    let v = json(&cknkit(&[
        "sweep",
        "--N",
        "3",
        "--mu1",
        "0",
        "--mu2",
        "-0.25:-0.01:20",
        "--p",
        "2:12:20",
    ]));
    let rows = v["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 400);
    for row in rows {
        let p = row["p"].as_f64().unwrap();
        let sharp = row["p_sharp"].as_f64().unwrap();
        let nonexistent = row["verdict"] == "Nonexistent";
        assert_eq!(nonexistent, p >= sharp, "{row}");
    }
}
