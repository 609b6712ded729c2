use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_contact-bethe"))
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str], config: &Path) -> Output {
    bin().args(args).arg("--config").arg(config).output().unwrap()
}

fn body(out: &Output) -> Value {
    let mut v: Value = serde_json::from_slice(&out.stdout).expect("stdout is a JSON report");
    v.as_object_mut().unwrap().remove("timing");
    v
}

const DELTA: &str = r#"{
    "system": {"n": 2, "N": 3, "statistics": "bose"},
    "boundary": {"type": "delta", "c": 1.5},
    "run": {"momenta": [-0.9, 0.2, 1.3]}
}"#;

const OFF_SET: &str = r#"{
    "system": {"n": 1, "N": 3},
    "boundary": {"type": "nonseparated", "theta": 0.3, "a": 2, "b": 0.5, "c": 1},
    "run": {"momenta": [-0.9, 0.2, 1.3]}
}"#;

#[test]
fn integrable_boundary_exits_zero() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "delta.json", DELTA);
    for cmd in ["ybe", "bethe-verify", "bound", "smatrix"] {
        let out = run(&[cmd], &cfg);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let v = body(&out);
        assert_eq!(v["schema_version"], "1");
        assert_eq!(v["command"], cmd);
        assert_eq!(v["passed"], true);
    }
}

#[test]
fn non_integrable_boundary_exits_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "off.json", OFF_SET);
    let out = run(&["ybe"], &cfg);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(body(&out)["passed"], false);
}

#[test]
fn config_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let malformed = write(&dir, "bad.json", "{ not json");
    assert_eq!(run(&["ybe"], &malformed).status.code(), Some(2));

    let unknown = write(&dir, "unknown.json", r#"{"system": {"n": 1, "N": 3}, "boundary": {"type": "delta", "c": 1}, "extra": 1}"#);
    assert_eq!(run(&["ybe"], &unknown).status.code(), Some(2));

    let one_particle = write(&dir, "n1.json", r#"{"system": {"n": 1, "N": 1}, "boundary": {"type": "delta", "c": 1}}"#);
    assert_eq!(run(&["ybe"], &one_particle).status.code(), Some(2));

    let missing = dir.path().join("absent.json");
    assert_eq!(run(&["ybe"], &missing).status.code(), Some(2));

    assert_eq!(bin().arg("ybe").output().unwrap().status.code(), Some(2));
    assert_eq!(bin().arg("no-such-command").output().unwrap().status.code(), Some(2));
}

#[test]
fn non_ascending_momenta_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "desc.json",
        r#"{"system": {"n": 1, "N": 3}, "boundary": {"type": "delta", "c": 1}, "run": {"momenta": [1.0, 0.5, -0.2]}}"#,
    );
    let out = run(&["smatrix"], &cfg);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "delta.json", DELTA);
    for cmd in ["ybe", "bethe-verify", "smatrix"] {
        let a = run(&[cmd], &cfg);
        let b = run(&[cmd], &cfg);
        assert_eq!(body(&a), body(&b), "{cmd} is not reproducible");
        let report: contact_bethe::report::Report = serde_json::from_slice(&a.stdout).unwrap();
        assert_eq!(report.to_json() + "\n", String::from_utf8(a.stdout).unwrap());
    }
}

#[test]
fn out_file_matches_stdout() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "delta.json", DELTA);
    let path = dir.path().join("report.json");
    let out = bin().args(["smatrix", "--out"]).arg(&path).arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
}

#[test]
fn seed_and_tol_overrides_are_recorded() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "delta.json", DELTA);
    let out = run(&["ybe", "--seed", "7", "--tol", "1e-9"], &cfg);
    let v = body(&out);
    assert_eq!(v["config"]["run"]["seed"], 7);
    assert_eq!(v["config"]["run"]["tol"], 1e-9);
    let default = body(&run(&["ybe"], &cfg));
    assert_eq!(default["config"]["run"]["seed"], 42);
}

#[test]
fn table_format() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "delta.json", DELTA);
    let out = run(&["smatrix", "--format", "table"], &cfg);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("command"));
    assert!(text.contains("unitarity_residual"));
    assert!(text.contains("elapsed"));
}

#[test]
fn classify_scan_single_point_and_grid() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "delta.json", DELTA);
    let out = run(&["classify-scan"], &cfg);
    assert_eq!(out.status.code(), Some(0));
    let v = body(&out);
    assert_eq!(v["results"]["grid"].as_array().unwrap().len(), 1);
    assert_eq!(v["results"]["classification_mismatches"], 0);

    let grid = write(
        &dir,
        "grid.json",
        r#"{
            "system": {"n": 1, "N": 3},
            "boundary": {"type": "nonseparated", "theta": 0.3, "a": 2, "b": 0.5, "c": 1},
            "run": {"grid": {"theta": [0.3, 0.7], "a": [2, 3], "b": [0.5], "c": [1]}}
        }"#,
    );
    let out = run(&["classify-scan"], &grid);
    assert_eq!(out.status.code(), Some(0));
    let v = body(&out);
    let rows = v["results"]["grid"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["expected_integrable"] == false));
}
