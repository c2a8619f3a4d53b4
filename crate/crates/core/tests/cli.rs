//! Black-box tests of the `milne` binary: exit codes and artifacts.

use std::path::Path;
use std::process::Command;

fn milne() -> Command {
    Command::new(env!("CARGO_BIN_EXE_milne"))
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn missing_config_is_a_config_error() {
    let status = milne().args(["--task", "spectrum"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // Task is missing its energy.
    let cfg = write_config(
        dir.path(),
        r#"{
            "potential": {"name": "square_well"},
            "grid": {"lo": -1.5, "hi": 1.5, "n_points": 64},
            "task": {"name": "solve-emp"}
        }"#,
    );
    let status = milne()
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn unknown_field_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{
            "potential": {"name": "square_well"},
            "grid": {"lo": -1.5, "hi": 1.5, "n_points": 64},
            "task": {"name": "spectrum", "n_max": 0, "e_min": -0.5, "e_max": 3.0},
            "surprise": true
        }"#,
    );
    let status = milne()
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // No N(E) = 1 root between E = 10 and 20 for the square well.
    let cfg = write_config(
        dir.path(),
        r#"{
            "potential": {"name": "square_well"},
            "grid": {"lo": -1.5707963267948966, "hi": 1.5707963267948966, "n_points": 501},
            "task": {"name": "spectrum", "n_max": 0, "e_min": 10.0, "e_max": 20.0}
        }"#,
    );
    let status = milne()
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn transform_task_produces_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{
            "potential": {"name": "square_well"},
            "grid": {"lo": -1.5707963267948966, "hi": 1.5707963267948966,
                     "margin": 1e-4, "n_points": 2001},
            "task": {
                "name": "transform",
                "energy": 3.0,
                "rho0": 0.7071067811865476,
                "transforms": [
                    {"order": 1, "superpotential": {"name": "tan"}}
                ]
            }
        }"#,
    );
    let out = dir.path().join("out");
    let status = milne()
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("emp_input.csv").is_file());
    assert!(out.join("emp_step_1.csv").is_file());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    let step = &report["payload"]["steps"][0];
    assert_eq!(step["quantum_number_shift"], 1);
    assert!(step["max_residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn verify_squarewell_runs_without_config() {
    let dir = tempfile::tempdir().unwrap();
    let output = milne()
        .args(["--task", "verify-squarewell", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert_eq!(output.status.code(), Some(0), "stdout:\n{stdout}");
    assert!(stdout.contains("PASS"));
    assert!(!stdout.contains("FAIL"));
    assert!(dir.path().join("report.json").is_file());
}
