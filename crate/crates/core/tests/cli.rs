use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn fracwave(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracwave"))
        .current_dir(dir)
        .env("FRACWAVE_THREADS", "1")
        .args(args)
        .output()
        .expect("spawn fracwave")
}

const OPERATOR: &str = r#"{
  "schema_version": 1,
  "experiment": "limiting_amplitude_operator",
  "eigenvalues": [1, 2, 3, 4, 5],
  "params": { "alpha": 1.5, "omega": 1.0 },
  "schedule": { "t0": 1, "factor": 2, "count": 9 },
  "output_dir": "out"
}"#;

fn output_hashes(manifest: &Value) -> Vec<(String, String)> {
    manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| (o["file"].as_str().unwrap().to_owned(), o["sha256"].as_str().unwrap().to_owned()))
        .collect()
}

#[test]
fn run_is_deterministic_and_hashes_outputs() {
    let mut runs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("c.json"), OPERATOR).unwrap();
        let out = fracwave(dir.path(), &["run", "c.json"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let manifest: Value = serde_json::from_slice(&std::fs::read(dir.path().join("out/manifest.json")).unwrap()).unwrap();
        let hashes = output_hashes(&manifest);
        assert!(!hashes.is_empty());
        for (file, _) in &hashes {
            assert!(dir.path().join("out").join(file).exists(), "{file} missing");
        }
        runs.push((hashes, manifest["results"].clone()));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn validate_reports_the_offending_field() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), OPERATOR.replace("1.5", "2.5")).unwrap();
    let out = fracwave(dir.path(), &["validate", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["path"], "params.alpha");
    assert!(!dir.path().join("out").exists());

    std::fs::write(dir.path().join("ok.json"), OPERATOR).unwrap();
    assert!(fracwave(dir.path(), &["validate", "ok.json"]).status.success());
}

#[test]
fn specfun_prints_value_and_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracwave(dir.path(), &["specfun", "mittag_leffler", "1", "1", "1.0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let re: f64 = text.lines().next().unwrap().split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((re - std::f64::consts::E).abs() < 1e-13);
    assert!(text.contains("abs_err"));

    let out = fracwave(dir.path(), &["specfun", "no_such_function", "1"]);
    assert!(!out.status.success());
}

#[test]
fn bad_thread_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fracwave"))
        .current_dir(dir.path())
        .env("FRACWAVE_THREADS", "zero")
        .args(["specfun", "gamma", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
