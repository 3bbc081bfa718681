use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quantumness"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn svetlichny_succeeds_and_is_deterministic() {
    let a = run(&["--seed", "3", "svetlichny", "--samples", "16"]);
    let b = run(&["--seed", "3", "svetlichny", "--samples", "16"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.lines().count() >= 2);
}

#[test]
fn chsh_json_reports_violation() {
    let dir = fixtures();
    let out = run(&[
        "--json",
        "chsh",
        "--fixtures",
        dir.to_str().unwrap(),
        "--theta",
        "45",
        "--samples",
        "2000",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let text = v.to_string();
    assert!(text.contains("violated"), "{text}");
}

#[test]
fn missing_fixture_directory_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["coherence", "--fixtures", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("table3.csv"), "{err}");
}

#[test]
fn malformed_fixture_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("table3.csv"),
        "theta_deg,phi_deg,p_a0,p_a1\n60,0,0.75,0.25\n60,5,abc,0.3\n",
    )
    .unwrap();
    let out = run(&["coherence", "--fixtures", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("table3.csv:3") && err.contains("p_a0"), "{err}");
}

#[test]
fn failing_verdicts_exit_one_with_failure_list() {
    let dir = fixtures();
    let out = run(&["entropy", "--fixtures", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(!err["failures"].as_array().unwrap().is_empty());
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("witness.json");
    let out = run(&["--json", "--out", path.to_str().unwrap(), "witness", "--theta", "45"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v.is_array() || v.is_object());
}

#[test]
fn out_of_range_angle_is_rejected() {
    let out = run(&["tomography", "--theta", "120"]);
    assert_eq!(out.status.code(), Some(2));
}
