use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn hherz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hherz")).args(args).output().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn axioms_pass_and_are_deterministic() {
    let args = ["axioms", "--n", "1", "--samples", "300", "--seed", "5"];
    let a = hherz(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = hherz(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v[0]["pass"], true);
}

#[test]
fn malformed_scenario_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"name": "x", "n": 1}"#).unwrap();
    assert_eq!(hherz(&["inequality", "--scenario", path_str(&bad)]).status.code(), Some(2));
    let unknown = dir.path().join("unknown.json");
    let text = fs::read_to_string(scenarios().join("thm1_case_i_worked.json")).unwrap();
    fs::write(&unknown, text.replacen('{', r#"{"extra": 1,"#, 1)).unwrap();
    assert_eq!(hherz(&["norms", "--scenario", path_str(&unknown)]).status.code(), Some(2));
}

#[test]
fn violated_hypotheses_exit_2_without_output() {
    let p = scenarios().join("invalid").join("violated_hypotheses.json");
    let out = hherz(&["constants", "--scenario", path_str(&p)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("A₁"));
}

#[test]
fn first_run_pins_then_drift_fails() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("worked.json");
    fs::copy(scenarios().join("thm1_case_i_worked.json"), &sc).unwrap();
    let baselines = dir.path().join("baselines.json");

    let first = hherz(&["inequality", "--scenario", path_str(&sc), "--budget", "16384"]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let report: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(report["baseline"]["newly_pinned"], true);
    let mut table: serde_json::Value = serde_json::from_str(&fs::read_to_string(&baselines).unwrap()).unwrap();
    let pinned = table["entries"]["thm1_case_i_worked"]["ratio"].as_f64().unwrap();
    assert!((pinned - report["ratio"].as_f64().unwrap()).abs() < 1e-15);

    table["entries"]["thm1_case_i_worked"]["ratio"] = serde_json::json!(pinned * 1.2);
    fs::write(&baselines, table.to_string()).unwrap();
    let second = hherz(&["inequality", "--scenario", path_str(&sc), "--budget", "16384", "--format", "csv"]);
    assert_eq!(second.status.code(), Some(1));
    let csv = String::from_utf8(second.stdout).unwrap();
    assert!(csv.starts_with("scenario,theorem"));
    assert!(csv.lines().nth(1).unwrap().contains(",false,"));
}

#[test]
fn constants_and_norms_report_values() {
    let p = scenarios().join("thm1_case_i_worked.json");
    let out = hherz(&["constants", "--scenario", path_str(&p), "--budget", "8192"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let k1 = v["values"][1][1]["value"].as_f64().unwrap();
    assert!((k1 / (4.0 * std::f64::consts::PI.powi(2) * (3.0 * 2f64.ln() - 1.0)) - 1.0).abs() < 1e-2);

    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("norms.csv");
    let out = hherz(&["norms", "--scenario", path_str(&p), "--budget", "8192", "--format", "csv", "--out", path_str(&out_path)]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(&out_path).unwrap();
    assert_eq!(csv.lines().count(), 4);
}
