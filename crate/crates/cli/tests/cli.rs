use std::path::PathBuf;

use serde_json::Value;
use tempfile::TempDir;

use qcap_cli::{load_channel_spec, round_numbers, run, EXIT_INVALID, EXIT_NOT_CONVERGED, EXIT_OK};

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn spec(&self, name: &str, body: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        path
    }
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qcap").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn invoke_json(args: &[&str]) -> (i32, Value) {
    let (code, out, _) = invoke(args);
    (
        code,
        serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}")),
    )
}

const IDENTITY: &str = r#"{"kind": "identity", "dim": 2}"#;
const BROKEN: &str = r#"{"dim_in": 2, "dim_out": 2, "kraus": [
    [[1, 0], [0, 0], [0, 0], [1, 0]],
    [[1, 0], [0, 0], [0, 0], [1, 0]]]}"#;

#[test]
fn ce_on_identity_is_two_bits() {
    let ws = Workspace::new();
    let spec = ws.spec("identity.json", IDENTITY);
    let (code, report) = invoke_json(&["ce", spec.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!((report["value"].as_f64().unwrap() - 2.0).abs() <= 1e-3);
    assert_eq!(report["converged"], true);
}

#[test]
fn duplicated_identity_kraus_is_rejected_with_residual() {
    let ws = Workspace::new();
    let spec = ws.spec("broken.json", BROKEN);
    let (code, report) = invoke_json(&["validate", spec.to_str().unwrap()]);
    assert_eq!(code, EXIT_INVALID);
    assert_eq!(report["valid"], false);
    // Σ K†K = 2I, so the residual is ‖I‖_F = √2.
    let residual = report["completeness_residual"].as_f64().unwrap();
    assert!((residual - 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn depolarizing_bound_has_no_violations() {
    let ws = Workspace::new();
    let spec = ws.spec(
        "depolarizing_half.json",
        r#"{"kind": "depolarizing", "dim": 2, "params": {"p": 0.5}}"#,
    );
    let (code, report) = invoke_json(&["bound", spec.to_str().unwrap(), "--samples", "1000", "--seed", "42"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(report["violations"], 0);
    assert_eq!(report["samples"], 1000);
    assert_eq!(report["inputs"]["seed"], 42);
}

#[test]
fn named_and_explicit_specs_load() {
    let ws = Workspace::new();
    let dep = ws.spec(
        "dep.json",
        r#"{"kind": "depolarizing", "dim": 2, "params": {"p": 0.5}}"#,
    );
    assert_eq!(load_channel_spec(&dep).unwrap().channel.kraus().len(), 4);
    let id = ws.spec(
        "id.json",
        r#"{"dim_in": 2, "dim_out": 2, "kraus": [[[1, 0], [0, 0], [0, 0], [1, 0]]]}"#,
    );
    let loaded = load_channel_spec(&id).unwrap();
    assert_eq!(loaded.channel.kraus().len(), 1);
    assert_eq!(loaded.sha256.len(), 64);
}

#[test]
fn malformed_specs_exit_one() {
    let ws = Workspace::new();
    let cases = [
        (
            "mismatch.json",
            r#"{"dim_in": 3, "dim_out": 2, "kraus": [[[1, 0], [0, 0], [0, 0], [1, 0]]]}"#,
        ),
        ("syntax.json", r#"{"kind": "identity""#),
        ("unknown.json", r#"{"kind": "teleporter"}"#),
        ("param.json", r#"{"kind": "dephasing", "params": {"p": 1.5}}"#),
        ("extra.json", r#"{"kind": "identity", "colour": "red"}"#),
    ];
    for (name, body) in cases {
        let spec = ws.spec(name, body);
        for cmd in ["validate", "ce", "bound"] {
            let (code, report) = invoke_json(&[cmd, spec.to_str().unwrap()]);
            assert_eq!(code, EXIT_INVALID, "{name} via {cmd}");
            assert!(report["error"].is_string());
        }
    }
    let (code, _, _) = invoke(&["ce", "/nonexistent/spec.json"]);
    assert_eq!(code, EXIT_INVALID);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(invoke(&["frobnicate"]).0, EXIT_INVALID);
    assert_eq!(invoke(&["--tol=0", "zoo"]).0, EXIT_INVALID);
    assert_eq!(invoke(&["--restarts", "0", "zoo"]).0, EXIT_INVALID);
    assert_eq!(invoke(&["--output", "csv", "zoo"]).0, EXIT_INVALID);
    assert_eq!(invoke(&["--help"]).0, EXIT_OK);
}

#[test]
fn iteration_cap_reports_non_convergence() {
    let ws = Workspace::new();
    let spec = ws.spec("ad.json", r#"{"kind": "amplitude_damping", "params": {"gamma": 0.3}}"#);
    let (code, report) = invoke_json(&["ce", spec.to_str().unwrap(), "--max-iter", "1"]);
    assert_eq!(code, EXIT_NOT_CONVERGED);
    assert_eq!(report["converged"], false);
    let (code, _) = invoke_json(&["bound", spec.to_str().unwrap(), "--max-iter", "1", "--samples", "5"]);
    assert_eq!(code, EXIT_NOT_CONVERGED);
}

#[test]
fn output_is_byte_deterministic_and_embeds_inputs() {
    let ws = Workspace::new();
    let spec = ws.spec("ad.json", r#"{"kind": "amplitude_damping", "params": {"gamma": 0.5}}"#);
    let path = spec.to_str().unwrap();
    for cmd in ["ce", "holevo", "additivity"] {
        let a = invoke(&[cmd, path, "--seed", "9"]);
        let b = invoke(&[cmd, path, "--seed", "9"]);
        assert_eq!(a, b, "{cmd}");
        let report: Value = serde_json::from_str(&a.1).unwrap();
        assert_eq!(report["inputs"]["seed"], 9);
        assert_eq!(report["inputs"]["tol"], 1e-6);
        assert_eq!(report["inputs"]["spec_sha256"].as_str().unwrap().len(), 64);
    }
    let (_, first) = invoke_json(&["ce", path]);
    std::fs::write(
        &spec,
        r#"{"kind": "amplitude_damping", "params": {"gamma": 0.5}, "dim": 2}"#,
    )
    .unwrap();
    let (_, second) = invoke_json(&["ce", path]);
    assert_ne!(first["inputs"]["spec_sha256"], second["inputs"]["spec_sha256"]);
}

#[test]
fn csv_trace_is_monotone_per_restart() {
    let ws = Workspace::new();
    let spec = ws.spec("ad.json", r#"{"kind": "amplitude_damping", "params": {"gamma": 0.25}}"#);
    let (code, csv, _) = invoke(&["ce", spec.to_str().unwrap(), "--output", "csv", "--restarts", "2"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("restart,iteration,value"));
    let rows: Vec<(usize, usize, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert!(rows.iter().any(|r| r.0 == 1));
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            assert_eq!(w[1].1, w[0].1 + 1);
            // values are rounded to 12 significant digits
            assert!(w[1].2 >= w[0].2 - 1e-9);
        }
    }
}

#[test]
fn zoo_and_demos() {
    let (code, zoo) = invoke_json(&["zoo"]);
    assert_eq!(code, EXIT_OK);
    let channels = zoo["channels"].as_array().unwrap();
    assert_eq!(channels.len(), 7);
    let names: Vec<&str> = channels.iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"identity"));

    let (code, dense) = invoke_json(&["demo", "dense-coding"]);
    assert_eq!(code, EXIT_OK);
    for (m, entry) in dense["messages"].as_array().unwrap().iter().enumerate() {
        assert_eq!(entry["decoded"], m);
    }
    assert_eq!(dense["bits_per_qubit"], 2.0);

    let (code, tele) = invoke_json(&["demo", "teleportation", "--seed", "3"]);
    assert_eq!(code, EXIT_OK);
    assert!(tele["fidelity_min"].as_f64().unwrap() >= 1.0 - 1e-10);

    let (code, fb) = invoke_json(&["demo", "feedback-equivalence"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(fb["resources_match"], true);
}

#[test]
fn numbers_keep_twelve_significant_digits() {
    let mut v = serde_json::json!({ "a": [2.0 / 3.0, -0.0, 1.0e-20 / 3.0], "b": 7 });
    round_numbers(&mut v);
    assert_eq!(v["a"][0].as_f64().unwrap(), 0.666666666667);
    assert_eq!(v["a"][1].to_string(), "0.0");
    assert_eq!(v["a"][2].as_f64().unwrap(), 3.33333333333e-21);
    assert_eq!(v["b"], 7);
}

#[test]
fn binary_propagates_exit_codes() {
    let ws = Workspace::new();
    let broken = ws.spec("broken.json", BROKEN);
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_qcap"))
        .arg("validate")
        .arg(&broken)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_INVALID));
    let report: Value = serde_json::from_slice(&status.stdout).unwrap();
    assert_eq!(report["valid"], false);
}
