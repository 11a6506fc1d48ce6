use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SPEC: &str = r#"{
    "n": 3000,
    "weight_rule": {"kind": "linear_alpha", "alpha": 1.0},
    "checkpoints": [0.5, 1.0, 1.5],
    "checkpoints_rel": true,
    "seed": 11,
    "replicates": 6,
    "pi_ks": [0, 1, 2],
    "comparison": {"ks": [3]}
}"#;

fn pagiant(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pagiant"));
    cmd.args(args).env_remove("PAGIANT_SEED");
    if let Some(s) = seed_env {
        cmd.env("PAGIANT_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn outputs(dir: &Path) -> Vec<Vec<u8>> {
    ["trajectory.csv", "degrees.csv", "summary.json"]
        .iter()
        .map(|f| fs::read(dir.join(f)).unwrap())
        .collect()
}

fn simulate(spec: &Path, out: &Path, extra: &[&str], seed_env: Option<&str>) -> Vec<Vec<u8>> {
    let mut args = vec!["simulate", "--spec", spec.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = pagiant(&args, seed_env);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    outputs(out)
}

#[test]
fn simulate_is_independent_of_job_count() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, SPEC).unwrap();
    let one = simulate(&spec, &dir.path().join("j1"), &["--jobs", "1"], None);
    let four = simulate(&spec, &dir.path().join("j4"), &["--jobs", "4"], None);
    assert_eq!(one, four);

    let trajectory = String::from_utf8(one[0].clone()).unwrap();
    assert_eq!(trajectory.lines().next(), Some("replicate,m,L1,L2,S,loops,multi_edges"));
    assert_eq!(trajectory.lines().count(), 1 + 6 * 3);
    let summary: serde_json::Value = serde_json::from_slice(&one[2]).unwrap();
    assert_eq!(summary["seed"], 11);
    assert_eq!(summary["checkpoints"], serde_json::json!([375, 750, 1125]));
    assert_eq!(summary["completed"], 6);
    assert!(summary["theory"][2]["prediction"]["rho"].as_f64().unwrap() > 0.24);
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, SPEC).unwrap();
    let from_spec = simulate(&spec, &dir.path().join("a"), &[], None);
    let from_env = simulate(&spec, &dir.path().join("b"), &[], Some("12"));
    let from_flag = simulate(&spec, &dir.path().join("c"), &["--seed", "12"], Some("99"));
    assert_ne!(from_spec[0], from_env[0]);
    assert_eq!(from_env, from_flag);
    let explicit = simulate(&spec, &dir.path().join("d"), &["--seed", "11"], None);
    assert_eq!(from_spec, explicit);
}

#[test]
fn relative_checkpoints_flag() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, SPEC.replace("\"checkpoints_rel\": true,", "")).unwrap();
    let o = pagiant(&["simulate", "--spec", spec.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    simulate(&spec, dir.path(), &["--checkpoints-rel"], None);
}

#[test]
fn invalid_spec_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, SPEC.replace("\"replicates\": 6", "\"replicates\": \"six\"")).unwrap();
    let o = pagiant(&["simulate", "--spec", spec.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("replicates"));
}

#[test]
fn theory_prints_json() {
    let o = pagiant(&["theory", "--alpha", "1", "--eps", "0.5", "--k", "3,4"], None);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["rho"].as_f64().unwrap() - 0.241694260788208).abs() < 1e-9);
    assert_eq!(v["c_k"].as_array().unwrap().len(), 2);
    assert!(v["mr_criterion"].as_f64().unwrap() > 0.0);

    let o = pagiant(&["theory", "--alpha", "-3", "--eps", "0.2"], None);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["rho"].as_f64().unwrap() - 19.0 / 27.0).abs() < 1e-9);

    let o = pagiant(&["theory", "--alpha", "-1", "--eps", "0.2"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("sweep.json");
    fs::write(
        &spec,
        r#"{"n": 4000, "weight_rule": {"kind": "linear_alpha", "alpha": 2.0}, "replicates": 3,
            "grid": {"parameter": "t", "values": [0.05, 0.1, 0.2]}, "output": "s.csv"}"#,
    )
    .unwrap();
    let o = pagiant(
        &["sweep", "--spec", spec.to_str().unwrap(), "--out", dir.path().to_str().unwrap()],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().skip(1).all(|l| l.starts_with("t,")));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let o = pagiant(&["verify", "--json", json.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&json).unwrap()).unwrap();
    assert_eq!(v["passed"], true);

    let o = pagiant(&["verify", "--perturb-rho", "1e-3"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}
