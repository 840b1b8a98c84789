use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_clockforge"))
}

fn circuit(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("circuits").join(name)
}

fn run(out: &Path, args: &[&str]) -> Output {
    bin().arg("--out").arg(out).args(args).env_remove("CLOCKFORGE_THREADS").output().unwrap()
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap()
}

fn stderr_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stderr).unwrap()
}

#[test]
fn bell_circuit_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(dir.path(), &["verify", circuit("bell.circ").to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));
    let summary = stdout_json(&output);
    assert_eq!(summary["all_passed"], Value::Bool(true));
    let names: Vec<&str> =
        summary["circuits"][0]["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    for expected in
        ["projection_H_P", "projection_H_I_mid", "null_vector", "gershgorin_containment", "subspace_invariance"]
    {
        assert!(names.contains(&expected), "{expected} missing from {names:?}");
    }
    assert!(dir.path().join("verify.json").exists());
}

#[test]
fn random_circuits_verify() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(dir.path(), &["verify", "--random", "4", "--seed", "9", "--qubits", "3", "--gates", "5"]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(stdout_json(&output)["circuits"].as_array().unwrap().len(), 4);
}

#[test]
fn non_unitary_circuit_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(dir.path(), &["verify", circuit("non_unitary.circ").to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(stderr_json(&output)["error"], "non_unitary");
}

#[test]
fn missing_circuit_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(dir.path(), &["verify", "no/such/file.circ"]);
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(stderr_json(&output)["error"], "io");
}

#[test]
fn single_length_scaling_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(dir.path(), &["scaling", "--L", "12"]);
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(stderr_json(&output)["error"], "invalid_parameter");
}

#[test]
fn scaling_routes_agree() {
    let dir = tempfile::tempdir().unwrap();
    let slopes: Vec<f64> = ["eigensolver", "secular"]
        .iter()
        .map(|mode| {
            let output = run(dir.path(), &["scaling", "--L", "10,12,14,16", "--mode", mode]);
            assert_eq!(output.status.code(), Some(0));
            let file: Value =
                serde_json::from_slice(&std::fs::read(dir.path().join(format!("scaling_{mode}.json"))).unwrap())
                    .unwrap();
            for key in ["eta", "L", "gap", "slope", "intercept", "residual"] {
                assert!(file.get(key).is_some(), "{key}");
            }
            file["slope"].as_f64().unwrap()
        })
        .collect();
    assert!((slopes[0] - slopes[1]).abs() < 1e-4, "{slopes:?}");
    assert!((slopes[0] + 4f64.ln()).abs() < 0.03);
}

#[test]
fn gap_scan_writes_csv_and_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["gap-scan", "--family", "naive", "--L", "8", "--points", "51"];
    let first = run(a.path(), &args);
    let second = run(b.path(), &args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let csv_a = std::fs::read_to_string(a.path().join("gap_scan_naive.csv")).unwrap();
    let csv_b = std::fs::read_to_string(b.path().join("gap_scan_naive.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    assert!(csv_a.starts_with("param,e0,e1,gap\n"));
    assert_eq!(csv_a.lines().count(), 52);
}

#[test]
fn evolve_outputs_and_timing_flag() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(dir.path(), &["evolve", "--L", "6", "--tau", "10", "--T1", "20", "--T3", "20"]);
    assert_eq!(output.status.code(), Some(0));
    let summary = stdout_json(&output);
    assert!(summary.get("runtime_seconds").is_none());
    assert!(summary["final_overlap"].as_f64().unwrap() > 0.95);
    let csv = std::fs::read_to_string(dir.path().join("evolve_three_stage.csv")).unwrap();
    assert!(csv.starts_with("t,overlap,norm\n"));

    let output = run(dir.path(), &["evolve", "--L", "6", "--tau", "10", "--timing"]);
    assert!(stdout_json(&output)["runtime_seconds"].as_f64().is_some());
}

#[test]
fn error_study_writes_error_columns() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(dir.path(), &["evolve", "--error-study", "--L", "10", "--tau", "20"]);
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));
    let summary = stdout_json(&output);
    assert!(summary["max_abs_err_sq"].as_f64().unwrap() <= summary["fourth_derivative_bound"].as_f64().unwrap());
    let csv = std::fs::read_to_string(dir.path().join("error_study.csv")).unwrap();
    assert!(csv.starts_with("t,overlap,norm,abs_err_sq,rel_err_sq\n"));
}

#[test]
fn ground_state_and_gnuplot() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(dir.path(), &["--gnuplot", "ground-state", "--L", "8"]);
    assert_eq!(output.status.code(), Some(0));
    let summary = stdout_json(&output);
    assert!((summary["success_probability_limit"].as_f64().unwrap() - 0.9375).abs() < 1e-15);
    for file in ["ground_state_lattice.csv", "ground_state_continuum.csv", "ground_state.json", "ground_state.gp"] {
        assert!(dir.path().join(file).exists(), "{file}");
    }
}

#[test]
fn config_file_fills_unset_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "[gap-scan]\nfamily = \"stage3\"\nL = 6\npoints = 11\neta = 5.0\n").unwrap();
    let output = bin()
        .arg("--out")
        .arg(dir.path())
        .arg("--config")
        .arg(&config)
        .args(["gap-scan", "--eta", "4"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));
    let summary = stdout_json(&output);
    assert_eq!(summary["family"], "stage3");
    assert_eq!(summary["L"], 6);
    assert_eq!(summary["eta"], 4.0);
}

#[test]
fn bad_config_and_bad_threads_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "[gap-scan]\nbogus = 1\n").unwrap();
    let output = bin().arg("--config").arg(&config).arg("--out").arg(dir.path()).arg("gap-scan").output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(stderr_json(&output)["error"], "invalid_parameter");

    let output = bin()
        .arg("--out")
        .arg(dir.path())
        .args(["ground-state", "--L", "4"])
        .env("CLOCKFORGE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn thread_cap_does_not_change_results() {
    let a = tempfile::tempdir().unwrap();
    let args = ["gap-scan", "--L", "10", "--points", "64"];
    let single = bin().arg("--out").arg(a.path()).args(args).env("CLOCKFORGE_THREADS", "1").output().unwrap();
    let many = bin().arg("--out").arg(a.path()).args(args).env("CLOCKFORGE_THREADS", "4").output().unwrap();
    assert_eq!(single.status.code(), Some(0));
    assert_eq!(single.stdout, many.stdout);
}

#[test]
fn unstable_step_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let output = run(dir.path(), &["evolve", "--mode", "naive", "--L", "4", "--T", "10", "--dt", "2"]);
    assert_eq!(output.status.code(), Some(2));
    assert_eq!(stderr_json(&output)["error"], "step_too_large");
}
