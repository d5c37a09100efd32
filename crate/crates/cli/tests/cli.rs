//! End-to-end runs of the `metroscope` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metroscope"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn sidecar(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

fn csv_rows(path: &PathBuf) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn pure_symmetric_average_passes_its_check() {
    let dir = tmp();
    let out = run(
        dir.path(),
        &["avg-qfi", "--space", "sym", "--N", "20", "--d", "2", "--pure", "--samples", "2000", "--seed", "7", "--check"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("avg-qfi.csv"));
    assert_eq!(rows.len(), 1);
    let mean: f64 = rows[0][6].parse().unwrap();
    assert!((mean - 140.0).abs() < 3.0);
    let side = sidecar(&dir.path().join("avg-qfi.json"));
    assert_eq!(side["schema"], "metroscope-result/1");
    assert_eq!(side["seed"], 7);
    assert_eq!(side["config"]["samples"], 2000);
    assert!(side["version"].as_str().unwrap().starts_with(env!("CARGO_PKG_VERSION")));
    assert!(side["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    assert!(side["timestamp"].is_string());
}

#[test]
fn beam_splitter_equivalence_check() {
    let dir = tmp();
    let out = run(dir.path(), &["bs-equiv", "--N", "12", "--eta", "0.3", "--check", "--oracle-states", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for row in csv_rows(&dir.path().join("bs-equiv.csv")) {
        assert!(row[3].parse::<f64>().unwrap() <= 1e-12);
        assert_eq!(row[5], "true");
    }
}

#[test]
fn oversized_full_space_is_a_capacity_error() {
    let dir = tmp();
    let out = run(dir.path(), &["avg-qfi", "--space", "full", "--N", "20"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("capacity"), "{err}");
    assert!(err.contains("--space sym"), "{err}");
    assert!(!dir.path().join("avg-qfi.csv").exists());
}

#[test]
fn violated_tolerance_exits_with_two() {
    let dir = tmp();
    let args = ["avg-qfi", "--N", "6", "--samples", "200", "--rel-tol", "0"];
    assert_eq!(run(dir.path(), &args).status.code(), Some(0));
    let mut checked = args.to_vec();
    checked.push("--check");
    assert_eq!(run(dir.path(), &checked).status.code(), Some(2));
    assert_eq!(sidecar(&dir.path().join("avg-qfi.json"))["passed"], false);
}

#[test]
fn output_is_reproducible_and_worker_independent() {
    let dir = tmp();
    let base = ["mz-fi", "--N", "12", "--samples", "40", "--seed", "3"];
    let mut outputs = Vec::new();
    for (i, workers) in ["1", "1", "3"].iter().enumerate() {
        let path = format!("run{i}.csv");
        let mut args = base.to_vec();
        args.extend(["--workers", workers, "--out", &path]);
        assert_eq!(run(dir.path(), &args).status.code(), Some(0));
        outputs.push(std::fs::read(dir.path().join(&path)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tmp();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"experiment": "loss", "N": 10, "k": [1, 2], "samples": 50, "seed": 9}"#).unwrap();
    let out = run(dir.path(), &["loss", "--config", "cfg.json", "--samples", "80", "--out", "res/loss.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let side = sidecar(&dir.path().join("res/loss.json"));
    assert_eq!(side["config"]["samples"], 80);
    assert_eq!(side["config"]["N"], 10);
    assert_eq!(side["config"]["k"], serde_json::json!([1, 2]));
    assert_eq!(side["seed"], 9);
    assert_eq!(csv_rows(&dir.path().join("res/loss.csv")).len(), 4);
}

#[test]
fn config_schema_is_enforced() {
    let dir = tmp();
    std::fs::write(dir.path().join("bad.json"), r#"{"N": 10, "sampels": 50}"#).unwrap();
    let out = run(dir.path(), &["loss", "--config", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sampels"));
    std::fs::write(dir.path().join("other.json"), r#"{"experiment": "mz-fi"}"#).unwrap();
    assert_eq!(run(dir.path(), &["loss", "--config", "other.json"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["loss", "--config", "missing.json"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["loss", "--samples", "lots"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["no-such-experiment"]).status.code(), Some(1));
}

#[test]
fn help_documents_columns() {
    let dir = tmp();
    let out = run(dir.path(), &["concentration", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("CSV columns"));
    assert!(text.contains("--workers"));
    assert_eq!(run(dir.path(), &["--version"]).status.code(), Some(0));
}

#[test]
fn small_runs_of_every_experiment() {
    let dir = tmp();
    let cases: &[&[&str]] = &[
        &["futility", "--N", "6", "--samples", "100", "--lu-n", "4", "--lu-states", "2", "--check"],
        &["loss", "--N", "12", "--k", "1,2", "--samples", "100", "--check"],
        &["mz-fi", "--N", "10", "--samples", "60", "--scan-states", "3", "--grid-points", "16"],
        &["circuit-converge", "--N", "10", "--K", "0,4,40", "--samples", "20", "--start", "polarized"],
        &["concentration", "--N", "8,16", "--samples", "60", "--check"],
        &["concentration", "--ensemble", "sym-depolarized", "--N", "8", "--samples", "60", "--check"],
        &["concentration", "--observable", "mz-fi", "--N", "8", "--samples", "60", "--check"],
        &["avg-qfi", "--N", "3", "--d", "3", "--decay", "0.5", "--samples", "500", "--check"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let path = format!("case{i}.csv");
        let mut a = args.to_vec();
        a.extend(["--out", &path]);
        let out = run(dir.path(), &a);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!csv_rows(&dir.path().join(&path)).is_empty(), "{args:?}");
    }
}

#[test]
fn circuit_start_state_without_gates_is_the_start_state() {
    let dir = tmp();
    let out = run(dir.path(), &["circuit-converge", "--N", "8", "--K", "0", "--samples", "5", "--start", "noon"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("circuit-converge.csv"));
    // The NOON state has QFI N².
    assert!((rows[0][1].parse::<f64>().unwrap() - 64.0).abs() < 1e-9);
}
