use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use schlicht::fixtures::COUNTEREXAMPLE_ANGLES;
use schlicht::io::TraceFile;
use serde_json::Value;

fn schlicht(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schlicht"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn angle_json(angles: &[f64]) -> String {
    serde_json::json!({ "m": angles.len(), "angles_rad": angles }).to_string()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn coeff_on_koebe_driver() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "koebe.json", &angle_json(&[PI; 7]));
    let out = schlicht(&["coeff", &file]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    for (key, expected) in [("a2", 2.0), ("a3", 3.0), ("a4", 4.0)] {
        assert!((num(&v["closed_form"][key][0]) - expected).abs() < 1e-12);
        assert!(num(&v["closed_form"][key][1]).abs() < 1e-12);
    }
    for (key, expected) in [("a5", 5.0), ("a6", 6.0)] {
        assert!((num(&v["oracle"][key][0]) - expected).abs() < 1e-12);
    }
    assert!((num(&v["log_coefficients"]["gamma3"][0]) - 1.0 / 3.0).abs() < 1e-12);
    assert!(num(&v["functionals"]["milin2"]).abs() < 1e-12);
    assert!(num(&v["functionals"]["milin3"]).abs() < 1e-12);
    assert!((num(&v["functionals"]["odd5"]) - 1.0).abs() < 1e-12);
    assert!((num(&v["functionals"]["odd7"]) - 1.0).abs() < 1e-12);
}

#[test]
fn coeff_on_counterexample_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv: String = COUNTEREXAMPLE_ANGLES.iter().map(|a| format!("{a}\n")).collect();
    let file = write(dir.path(), "table2.csv", &csv);
    let out = schlicht(&["coeff", &file]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((num(&v["functionals"]["odd7"]) - 1.006491).abs() <= 5e-6);
}

#[test]
fn coeff_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.json", r#"{"m": 0, "angles_rad": []}"#);
    let out = schlicht(&["coeff", &empty]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least one angle"));
    let mismatch = write(dir.path(), "bad.json", r#"{"m": 3, "angles_rad": [1.0]}"#);
    assert_eq!(schlicht(&["coeff", &mismatch]).status.code(), Some(2));
    assert_eq!(schlicht(&["coeff", "/nonexistent/angles.json"]).status.code(), Some(2));
}

#[test]
fn optimize_from_counterexample_without_iterations() {
    let dir = tempfile::tempdir().unwrap();
    let init = write(dir.path(), "table2.json", &angle_json(&COUNTEREXAMPLE_ANGLES));
    let out = schlicht(&[
        "optimize",
        "--functional",
        "odd7",
        "--schedule",
        "20",
        "--init",
        &init,
        "--max-iters",
        "0",
    ]);
    assert!(out.status.success());
    let trace: TraceFile = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(trace.functional, "odd7");
    assert_eq!(trace.stages.len(), 1);
    assert_eq!(trace.stages[0].iterations, 0);
    assert!((trace.stages[0].value - 1.006491).abs() <= 5e-6);
}

#[test]
fn optimize_trace_round_trips_through_coeff() {
    let dir = tempfile::tempdir().unwrap();
    let trace_path = dir.path().join("trace.json");
    let out = schlicht(&[
        "optimize",
        "--functional",
        "milin2",
        "--schedule",
        "4,8",
        "--restarts",
        "3",
        "--seed",
        "7",
        "--out",
        trace_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace: TraceFile =
        serde_json::from_str(&std::fs::read_to_string(&trace_path).unwrap()).unwrap();
    assert_eq!(trace.seed, 7);
    let last = trace.stages.last().unwrap();
    assert_eq!(last.m, 8);
    let angles = write(dir.path(), "best.json", &angle_json(&last.angles_rad));
    let v: Value = serde_json::from_slice(&schlicht(&["coeff", &angles]).stdout).unwrap();
    assert!((num(&v["functionals"]["milin2"]) - last.value).abs() <= 1e-12);
}

#[test]
fn optimize_csv_output() {
    let out = schlicht(&[
        "optimize",
        "--functional",
        "odd5",
        "--schedule",
        "3,6",
        "--restarts",
        "2",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,value,iterations,converged");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("6,"));
}

#[test]
fn optimize_usage_errors() {
    let bad_schedule = schlicht(&["optimize", "--functional", "odd5", "--schedule", "50,75"]);
    assert_eq!(bad_schedule.status.code(), Some(2));
    let bad_name = schlicht(&["optimize", "--functional", "odd9", "--schedule", "5"]);
    assert_eq!(bad_name.status.code(), Some(2));
    let missing = schlicht(&["optimize", "--functional", "odd5"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn verify_table2_command() {
    let out = schlicht(&["verify-table2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.trim_end().ends_with("PASS"));
    assert!(text.contains("1.00646352724"));
}

#[test]
fn milin_bound_command() {
    let out = schlicht(&["milin-bound"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("lambda0  = 0.3900456"));
    assert!(text.contains("bound    = 0.03485611"));
    let residual: f64 = text
        .lines()
        .find(|l| l.starts_with("residual"))
        .and_then(|l| l.split('=').nth(1))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(residual <= 1e-12);
    assert_eq!(schlicht(&["milin-bound", "--tol", "0.1"]).status.code(), Some(2));
}
