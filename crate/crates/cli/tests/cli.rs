//! End-to-end runs of the binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gamma2lab"))
        .args(args)
        .env_remove("GAMMA2LAB_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

#[test]
fn verify_identities_passes() {
    let out = run(&["verify-identities", "--trials", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "verify-identities");
    assert_eq!(doc["config"]["trials"], 4);
    assert_eq!(doc["pass"], true);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "probe",
        "--functional",
        "weighted",
        "--param-s",
        "-1",
        "--multistarts",
        "3",
        "--seed",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_comes_from_environment_unless_given() {
    let out = Command::new(env!("CARGO_BIN_EXE_gamma2lab"))
        .args(["check", "--theorem", "poincare", "--trials", "2"])
        .env("GAMMA2LAB_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(json(&out)["config"]["seed"], 99);
    let out = Command::new(env!("CARGO_BIN_EXE_gamma2lab"))
        .args([
            "check",
            "--theorem",
            "poincare",
            "--trials",
            "2",
            "--seed",
            "5",
        ])
        .env("GAMMA2LAB_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(json(&out)["config"]["seed"], 5);
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        vec!["check", "--theorem", "weighted", "--param-s", "0.5"],
        vec!["check"],
        vec!["check", "--theorem", "nonsense"],
        vec!["flow", "--dimension", "1"],
        vec!["counterexample", "--param-s", "-1"],
        vec!["probe", "--functional", "modified", "--param-s", "-2.2"],
        vec!["verify-identities", "--tolerance", "unknown=1"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn exploratory_cases_never_fail_a_run() {
    let out = run(&[
        "check",
        "--theorem",
        "modified",
        "--param-s",
        "-2.3",
        "--u0",
        "counterexample",
        "--exploratory",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let case = &doc["results"]["cases"][0];
    assert_eq!(case["exploratory"], true);
    assert!(case["margin"].as_f64().unwrap() < 0.0);
}

#[test]
fn failing_check_exits_with_one() {
    let out = run(&[
        "verify-identities",
        "--trials",
        "2",
        "--tolerance",
        "identity=1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn counterexample_is_resolved() {
    let out = run(&["counterexample", "--dimension", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let case = &json(&out)["results"]["cases"][0];
    assert!(case["report"]["margin"].as_f64().unwrap() < 0.0);
    assert_eq!(case["auxiliary"]["holds"], true);
    assert_eq!(case["pass"], true);
}

#[test]
fn empty_probe_sweep_passes() {
    let out = run(&["probe", "--functional", "weighted"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["rows"].as_array().unwrap().len(), 0);
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn flow_csv_has_increasing_times() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let report = dir.path().join("report.json");
    let out = run(&[
        "flow",
        "--csv",
        csv.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["pass"], true);
    let rows = read_csv(&csv);
    assert_eq!(rows[0][0], "t");
    assert_eq!(rows[0][1], "T");
    let ts: Vec<f64> = rows[1..].iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(ts.len() > 3);
    assert!(ts.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn several_exponents_write_one_csv_each() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let out = run(&[
        "flow",
        "--param-p",
        "1.5,1.2",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("traj_p1.5.csv").exists());
    assert!(dir.path().join("traj_p1.2.csv").exists());
}

#[test]
fn constant_density_has_zero_derivatives() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let out = run(&[
        "flow",
        "--u0",
        "eigenmode:1,0",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = read_csv(&csv);
    for r in &rows[1..] {
        for col in [2, 4] {
            assert!(r[col].parse::<f64>().unwrap().abs() < 1e-14, "{r:?}");
        }
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# sweep\ndimension = 3\ntrials = 2\ntheorem = poincare\nseed = 11\n",
    )
    .unwrap();
    let out = run(&["check", "--config", cfg.to_str().unwrap(), "--seed", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["config"]["dimension"], 3);
    assert_eq!(doc["config"]["seed"], 12);
    assert_eq!(doc["results"]["cases"].as_array().unwrap().len(), 2);
}
