//! End-to-end runs of the `coincident` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn coincident(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coincident"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> Value {
    let out = coincident(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest = String::from_utf8(out.stdout).unwrap();
    serde_json::from_str(&std::fs::read_to_string(manifest.trim()).unwrap()).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("error json on stderr");
    serde_json::from_str(line).unwrap()
}

fn last_row(csv: &Path) -> Vec<f64> {
    let text = std::fs::read_to_string(csv).unwrap();
    text.lines()
        .last()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect()
}

#[test]
fn design_writes_a_seven_column_schedule_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("design");
    let manifest = run_ok(&["design", "--samples", "300", "-o", out.to_str().unwrap()]);

    let text = std::fs::read_to_string(out.join("schedule.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,omega1,omega2,omega3,omega4,omega_e1,omega_e2"
    );
    assert_eq!(lines.clone().count(), 300);
    assert!(lines.all(|l| l.split(',').count() == 7));

    assert_eq!(manifest["command"], "design");
    assert_eq!(manifest["config"]["n_pairs"], 5);
    assert_eq!(manifest["versions"]["package"], env!("CARGO_PKG_VERSION"));
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    let artifact = &manifest["artifacts"][0];
    assert_eq!(artifact["file"], "schedule.csv");
    let digest = coincident_pulses::run::sha256_file(&out.join("schedule.csv")).unwrap();
    assert_eq!(artifact["sha256"], digest.as_str());
}

#[test]
fn train_reports_complete_transfer() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("train");
    run_ok(&["train", "-o", out.to_str().unwrap()]);
    let doc: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("train.json")).unwrap()).unwrap();
    let finals: Vec<f64> = doc["evolution"]["final_populations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!(finals[0].abs() < 1e-12 && finals[1].abs() < 1e-12 && (finals[2] - 1.0).abs() < 1e-12);
    assert_eq!(doc["evolution"]["steps"].as_array().unwrap().len(), 5);
}

#[test]
fn evolve_with_defaults_transfers_to_g3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("evolve");
    let manifest = run_ok(&["evolve", "-o", out.to_str().unwrap()]);
    let last = last_row(&out.join("trajectory.csv"));
    assert_eq!(last.len(), 7);
    assert!(last[5] >= 0.99, "final P_g3 = {}", last[5]);
    assert!(
        manifest["summary"]["final_populations"]["g3"]
            .as_f64()
            .unwrap()
            >= 0.99
    );
}

#[test]
fn config_file_flags_and_checksum_stability() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "n_pairs = 3\nmax_pairs = 2\ntarget_angle = \"pi/8\"\naxis1 = { min = 200.0, max = 300.0, points = 2 }\n",
    )
    .unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let args = |o: &Path| {
        vec![
            "n-scaling".to_string(),
            "--config".into(),
            config.to_str().unwrap().into(),
            "--max-pairs".into(),
            "3".into(),
            "-o".into(),
            o.to_str().unwrap().into(),
        ]
    };
    fn to_refs(v: &[String]) -> Vec<&str> {
        v.iter().map(String::as_str).collect()
    }
    let first = run_ok(&to_refs(&args(&a)));
    let second = run_ok(&to_refs(&args(&b)));
    assert_eq!(first["config"]["max_pairs"], 3);
    assert_eq!(first["config"]["n_pairs"], 3);
    assert_eq!(
        first["artifacts"][0]["sha256"],
        second["artifacts"][0]["sha256"]
    );
    let rows = std::fs::read_to_string(a.join("n_scaling.csv")).unwrap();
    assert_eq!(rows.lines().count(), 4);
}

#[test]
fn configuration_errors_exit_with_code_two() {
    let out = coincident(&["evolve", "--n-pairs", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "config");
    assert!(err["message"].as_str().unwrap().contains("n_pairs"));

    let out = coincident(&[
        "evolve", "--zeta", "1", "--delta1", "300", "--delta2", "300",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "n_pairs = 5\nunknown_key = 1\n").unwrap();
    let out = coincident(&["evolve", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["message"]
        .as_str()
        .unwrap()
        .contains("unknown_key"));

    let out = coincident(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oversized_step_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = coincident(&["evolve", "--dt", "0.01", "-o", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "numerical");
    assert!(err["message"].as_str().unwrap().contains("dt·‖H‖"));
}

#[test]
fn help_succeeds() {
    let out = coincident(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for cmd in [
        "design",
        "evolve",
        "train",
        "scan-detuning",
        "scan-two-photon",
        "n-scaling",
    ] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
}
