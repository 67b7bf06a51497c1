use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planar-ssf"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

#[test]
fn capacity_of_a_disc() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["capacity", "--shape", "disc", "--radius", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["C"].as_f64().unwrap() - 2.0 * 2f64.ln()).abs() < 1e-4);
    assert_eq!(v["N"], 512);
    let records: Vec<_> = std::fs::read_dir(dir.path().join("capacity")).unwrap().collect();
    assert_eq!(records.len(), 2, "JSON record and node CSV");
}

#[test]
fn shape_files_and_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("square.json");
    std::fs::write(&good, r#"{"kind": "polygon", "vertices": [[0,0],[1,0],[1,1],[0,1]]}"#).unwrap();
    let o = run(dir.path(), &["capacity", "--shape", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    // capacity of the unit square is Γ(1/4)² / (4 π^{3/2})
    let cap = 0.590_170_299_508_048_9_f64;
    assert!((json(&o)["C"].as_f64().unwrap() - 2.0 * cap.ln()).abs() < 1e-4);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(dir.path(), &["capacity", "--shape", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["capacity", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["sausage", "--time", "-1"]).status.code(), Some(2));
}

#[test]
fn coefficient_targets() {
    let dir = tempfile::tempdir().unwrap();
    let xi = json(&run(dir.path(), &["coeffs", "--capacity-const", "0", "--target", "xi"]));
    let shift = -4f64.ln() + 2.0 * 0.577_215_664_901_532_9;
    assert_eq!(xi["coefficients"]["-1"], 1.0);
    assert!((xi["coefficients"]["-2"].as_f64().unwrap() - shift).abs() < 1e-14);
    let gamma = json(&run(dir.path(), &["coeffs", "--capacity-const", "0", "--target", "gamma"]));
    assert_eq!(gamma["variable"], "log_t");
    assert!((gamma["coefficients"]["-1"].as_f64().unwrap() - 4.0 * std::f64::consts::PI).abs() < 1e-13);
    assert_eq!(run(dir.path(), &["coeffs", "--capacity-const", "0", "--target", "delta"]).status.code(), Some(2));
}

#[test]
fn sausage_runs_repeat_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sausage", "--time", "1", "--steps", "200", "--replicas", "20", "--seed", "5"];
    let a = run(dir.path(), &args);
    let b = run(dir.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    // same parameters, same record name
    assert_eq!(std::fs::read_dir(dir.path().join("sausage")).unwrap().count(), 1);
    let c = run(dir.path(), &["sausage", "--time", "1", "--steps", "200", "--replicas", "20", "--seed", "6"]);
    assert_ne!(json(&a)["mean_area"], json(&c)["mean_area"]);
}

#[test]
fn config_file_supplies_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 9, "sausage": {"replicas": 12, "steps": 100, "time": 0.5}}"#).unwrap();
    let o = run(dir.path(), &["--config", cfg.to_str().unwrap(), "sausage", "--replicas", "15"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["replicas"], 15);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["steps"], 100);
}

#[test]
fn tables_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["ssf", "--lambda-grid", "logspace:1e-10:1e-6:3", "--orders", "1,3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,xi_exact,xi_series_l1,xi_series_l3,r1,r3"));
    assert_eq!(lines.count(), 3);

    let o = run(dir.path(), &["selftest"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("x,j0,y0"));
}

#[test]
fn quick_verifications_pass() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["verify", "lattice"][..], &["verify", "laplace"], &["verify", "remainder"]] {
        let o = run(dir.path(), args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(json(&o)["passed"], true);
    }
}
