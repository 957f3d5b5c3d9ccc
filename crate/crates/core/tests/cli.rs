use std::fs;
use std::process::{Command, Output};

use operon::formats::state_to_json;
use operon::numerics::singlet;
use operon::{Dims, StateFunctional};

fn operon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_operon"))
        .args(args)
        .env_remove("OPERON_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = operon(&["run", "--dims", "2x2", "--seed", "42", "--trials", "20", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["reports"].as_array().unwrap().len(), 7);
    assert!(stdout(&o).contains("no_creation"));
}

#[test]
fn unknown_suite_is_a_usage_error_with_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = operon(&["run", "--suite", "no_creation,bogus", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!path.exists());
    assert!(stderr(&o).contains("bogus"));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(operon(&["run", "--dims", "2by2"]).status.code(), Some(2));
    assert_eq!(operon(&["run", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(operon(&["run", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(operon(&["frobnicate"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_operon"))
        .args(["run", "--suite", "no_creation", "--trials", "2"])
        .env("OPERON_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stable_output_is_byte_identical() {
    let args = ["run", "--suite", "no_creation,generic_entanglement", "--trials", "30", "--stable-output"];
    for format in ["json", "text", "csv"] {
        let mut a: Vec<&str> = args.to_vec();
        a.extend(["--format", format]);
        let first = operon(&a);
        let second = operon(&a);
        assert_eq!(first.status.code(), Some(0));
        assert_eq!(first.stdout, second.stdout, "{format}");
        if format == "json" {
            assert!(!stdout(&first).contains("wall_clock"));
        }
    }
}

#[test]
fn inspect_singlet_reports_entropy_and_schmidt_rank() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("singlet.json");
    let rho = StateFunctional::vector_state(&singlet()).unwrap().with_dims(Dims::new(2, 2)).unwrap();
    fs::write(&path, state_to_json(&rho)).unwrap();
    let o = operon(&["inspect", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("schmidt rank: 2"), "{out}");
    assert!(out.contains(&format!("entanglement entropy (nats): {:.12}", std::f64::consts::LN_2)), "{out}");
}

#[test]
fn corrupt_json_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"density": {"rows": 2, "cols": 2, "data": [[1, 0], [0, 0], [0, "x"], [0, 0]]}}"#).unwrap();
    let o = operon(&["inspect", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("density.data[2]"), "{err}");
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn kraus_bound_violation_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("op.json");
    fs::write(
        &path,
        r#"{"ambient_dim": 2, "kraus": [{"rows": 2, "cols": 2, "data": [[1.5, 0], [0, 0], [0, 0], [1, 0]]}]}"#,
    )
    .unwrap();
    let o = operon(&["inspect", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("[FAIL]"), "{}", stdout(&o));
}

#[test]
fn missing_file_is_a_usage_error() {
    assert_eq!(operon(&["inspect", "/nonexistent/state.json"]).status.code(), Some(2));
}
