use std::path::Path;
use std::process::{Command, Output};

const PARAMS: [&str; 10] = ["--E", "2", "--F", "1", "--lambda", "0.5", "--tau", "1", "--beta", "1"];

fn stark_walk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stark-walk"))
        .args(args)
        .env_remove("STARK_WALK_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn with_params(rest: &[&str]) -> Vec<String> {
    PARAMS.iter().chain(rest).map(|s| s.to_string()).collect()
}

fn run(rest: &[&str]) -> Output {
    let args = with_params(rest);
    stark_walk(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV document, header first.
fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn missing_force_is_named() {
    let out = stark_walk(&["--E", "2", "--lambda", "0.5", "--tau", "1", "--beta", "1", "rate"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("`F`"));
}

#[test]
fn zero_force_is_rejected() {
    let out = run(&["--F", "0", "rate"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`F`") && err.contains("> 0"), "{err}");
}

#[test]
fn rate_paths_agree() {
    let text = stdout(&run(&["rate", "--points", "41"]));
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["x", "I_closed", "I_numeric", "abs_diff"]);
    assert_eq!(rows.len(), 42);
    for row in &rows[1..] {
        assert!(row[3].parse::<f64>().unwrap() <= 1e-8);
    }
}

#[test]
fn walk_without_coupling_stays_put() {
    let text = stdout(&run(&["--lambda", "0", "walk", "--n", "50", "--trials", "500", "--seed", "1"]));
    let rows = csv_rows(&text);
    assert!(rows.len() > 1);
    for row in &rows[1..] {
        assert_eq!(row[0], "0");
    }
}

#[test]
fn energy_entropies_coincide() {
    let text = stdout(&run(&["fcs-energy", "--n", "2", "--m", "2"]));
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["dS_p", "dS_env", "probability"]);
    assert!(rows.len() > 2);
    for row in &rows[1..] {
        assert_eq!(row[0], row[1]);
    }
}

#[test]
fn metadata_is_recorded() {
    let text = stdout(&run(&["walk", "--n", "20", "--trials", "100", "--seed", "9"]));
    for key in ["# E = 2", "# F = 1", "# seed = 9", "# n = 20", "# trials = 100", "# tolerances = "] {
        assert!(text.contains(key), "missing {key}");
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let a = dir.path().join(format!("a.{format}"));
        let b = dir.path().join(format!("b.{format}"));
        for path in [&a, &b] {
            let p = path.to_str().unwrap();
            stdout(&run(&["--format", format, "--output", p, "walk", "--n", "300", "--trials", "5000", "--seed", "7"]));
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}

#[test]
fn json_matches_csv_exactly() {
    let csv = stdout(&run(&["fcs-position", "--n", "6"]));
    let json = stdout(&run(&["--format", "json", "fcs-position", "--n", "6"]));
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    let csv_rows = csv_rows(&csv);
    assert_eq!(rows.len() + 1, csv_rows.len());
    assert_eq!(doc["metadata"]["columns"], serde_json::json!(["dx", "probability"]));
    assert_eq!(doc["metadata"]["seed"], "0");
    for (j, c) in rows.iter().zip(&csv_rows[1..]) {
        for (x, s) in j.as_array().unwrap().iter().zip(c) {
            assert_eq!(x.as_f64().unwrap().to_bits(), s.parse::<f64>().unwrap().to_bits());
        }
    }
}

#[test]
fn config_file_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("run.toml");
    std::fs::write(&good, "E = 2.0\nF = 1.0\nlambda = 0.5\ntau = 1.0\nbeta = 1.0\npoints = 3\n").unwrap();
    let text = stdout(&stark_walk(&["--config", good.to_str().unwrap(), "rate"]));
    assert_eq!(csv_rows(&text).len(), 4);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "E = 2.0\nF = 1.0\nlambda = 0.5\ntau = 1.0\nbeta = 1.0\ntemperature = 3.0\n").unwrap();
    let out = stark_walk(&["--config", bad.to_str().unwrap(), "rate"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("temperature"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_stark-walk"))
        .args(with_params(&["spectrum", "--window", "5"]))
        .env("STARK_WALK_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv_rows(&written).len(), 6);
}

#[test]
fn unwritable_output_names_the_path() {
    let out = run(&["--output", "/nonexistent-dir/x.csv", "rate", "--points", "2"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent-dir/x.csv"));
    assert!(!Path::new("/nonexistent-dir/x.csv").exists());
}

#[test]
fn verify_all_exit_status() {
    let ok = run(&["verify-all"]);
    let text = stdout(&ok);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 13);
    assert!(rows[1..].iter().all(|r| r[1] == "1"));

    // At β = 0 the position fluctuation bracket has zero width and the
    // finite-n ratio cannot land on it.
    let failing = run(&["--beta", "0", "verify-all"]);
    assert_eq!(failing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failing.stdout).contains("FAIL"));
}
