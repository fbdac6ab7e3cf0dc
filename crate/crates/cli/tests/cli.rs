use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stokes-spectra"))
        .args(args)
        .env_remove("STOKES_SPECTRA_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn field(v: &Value, key: &str) -> f64 {
    v[key]
        .as_str()
        .expect("numbers are strings")
        .parse()
        .unwrap()
}

#[test]
fn constants_are_consistent() {
    let out = run(&["constants"]);
    assert!(out.status.success());
    let v = json(&out);
    let j = field(&v, "j11");
    let w = field(&v, "omega");
    assert_eq!(field(&v, "lambda1_disk"), j * j);
    assert_eq!(field(&v, "lambda1_ball"), w * w);
    let s = field(&v, "sin_omega");
    let a2 = 4.0 * std::f64::consts::PI / 3.0 * s * s / (w * w);
    assert!((field(&v, "a_squared") - a2).abs() <= 1e-15);
    for key in [
        "j11",
        "lambda1_disk",
        "omega",
        "lambda1_ball",
        "a_squared",
        "sin_omega",
        "c1",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn gamma_table_shape() {
    let out = run(&["gamma-table", "--n-max", "200"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,gamma_n,asymptotic_ratio,hessian_mode,coercivity_ratio")
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 199);
    assert!(rows.iter().all(|r| r[1] > 0.0 && r[4] > 100.0));
    assert!(rows
        .iter()
        .filter(|r| r[0] >= 80.0)
        .all(|r| (r[2] - 1.0).abs() <= 0.05));
    assert!(!text.contains('\r'));
    assert_eq!(run(&["gamma-table", "--n-max", "1"]).status.code(), Some(2));
    assert_eq!(
        run(&["gamma-table", "--n-max", "201"]).status.code(),
        Some(2)
    );
}

#[test]
fn d2f_examples_and_rigid_modes() {
    let v = json(&run(&["d2f", "--cos", "2=1"]));
    assert!((field(&v, "value") - 338.601_267_652_309_7).abs() <= 1e-9);
    let v = json(&run(&["d2f", "--cos", "2=1", "--sin", "3=0.5"]));
    assert_eq!(v["per_mode"].as_array().unwrap().len(), 2);

    let out = run(&["d2f", "--cos", "0=1"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "MODE_NOT_ALLOWED");
    assert_eq!(err["error"]["mode"], 0);
    assert_eq!(run(&["d2f", "--cos", "two=1"]).status.code(), Some(2));
}

#[test]
fn d1lambda_and_stream_coeffs() {
    let v = json(&run(&["d1lambda", "--cos", "0=1", "--cos", "3=1"]));
    let j = 3.831_705_970_207_512;
    assert!((field(&v, "d1_lambda") + 2.0 * j * j).abs() <= 1e-12);
    assert!(field(&v, "d1_f").abs() <= 1e-9);
    let v = json(&run(&["stream-coeffs", "--sin", "4=0.3"]));
    let modes = v["modes"].as_array().unwrap();
    assert_eq!(modes.len(), 1);
    assert_eq!(modes[0]["n"], 4);
    assert_eq!(modes[0]["a"], "0.0000000000000000e0");
}

#[test]
fn semidiff_and_certificate() {
    let cert = json(&run(&["certify-nonoptimality"]));
    assert_eq!(cert["certified"], true);
    let mu1: f64 = cert["spectrum"][0].as_str().unwrap().parse().unwrap();
    assert!((mu1 + 4.0 * std::f64::consts::PI / 15.0).abs() <= 1e-10);
    assert!(field(&cert, "semidiff_f") < -10.0);

    let yz = json(&run(&["semidiff", "--phi", "yz"]));
    let custom = json(&run(&["semidiff", "--phi", "custom", "--poly", "y*z"]));
    assert_eq!(yz, custom);
    let one = json(&run(&["semidiff", "--phi", "one"]));
    assert_eq!(field(&one, "semidiff_f"), 0.0);

    let out = run(&["semidiff", "--phi", "custom", "--poly", "y*w"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "PARSE_ERROR");
    assert_eq!(run(&["semidiff", "--phi", "custom"]).status.code(), Some(2));
    assert_eq!(run(&["semidiff", "--phi", "w"]).status.code(), Some(2));
}

#[test]
fn solve_buckling_and_seed_override() {
    let v = json(&run(&["solve-buckling", "--n-modes", "16"]));
    let j = 3.831_705_970_207_512_f64;
    assert!((field(&v, "lambda") - j * j).abs() <= 1e-8);
    assert_eq!(v["diagnostics"]["n_columns"], 66);

    let args = [
        "solve-buckling",
        "--t",
        "0.02",
        "--cos",
        "2=1",
        "--n-modes",
        "16",
    ];
    let a = run(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_stokes-spectra"))
        .args(args)
        .env("STOKES_SPECTRA_SEED", "7")
        .output()
        .unwrap();
    let (a, b) = (json(&a), json(&b));
    assert!((field(&a, "lambda") - field(&b, "lambda")).abs() <= 1e-7);
    assert_ne!(a["coefficients"], b["coefficients"]);

    let out = run(&["solve-buckling", "--t", "0.95", "--cos", "2=1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "solve-buckling",
        "--lambda-lo",
        "16",
        "--lambda-hi",
        "24",
        "--n-modes",
        "12",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["code"], "NO_EIGENVALUE_IN_BRACKET");
}

#[test]
fn validate_reports_and_exit_codes() {
    let out = run(&["validate", "--test", "eigenid-3d"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"][0]["suite"], "eigenid-3d");

    let out = run(&["validate", "--test", "eigenid-2d"]);
    assert!(out.status.success());

    // a step outside the admissible range makes every FD check fail
    let out = run(&["validate", "--test", "fd1", "--h", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["passed"], false);
    assert!(v["suites"][0]["checks"][0]["error"].is_string());
}

fn manifest_for(path: &Path) -> Value {
    let mut name = path.file_name().unwrap().to_os_string();
    name.push(".manifest.json");
    serde_json::from_slice(&fs::read(path.with_file_name(name)).unwrap()).unwrap()
}

#[test]
fn artifacts_are_atomic_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d2f.json");
    let o = out.to_str().unwrap();
    assert!(run(&["--out", o, "d2f", "--cos", "2=1"]).status.success());
    let first = fs::read(&out).unwrap();
    let m1 = manifest_for(&out);
    assert!(run(&["d2f", "--cos", "2=1", "--out", o]).status.success());
    assert_eq!(fs::read(&out).unwrap(), first);
    let m2 = manifest_for(&out);
    assert_eq!(m1["outputs"], m2["outputs"]);
    assert_eq!(m1["command"], "d2f");
    assert_eq!(m1["config"]["cos"][0][0], 2);

    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["manifest"], "d2f.json.manifest.json");
    let names: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(names.len(), 2, "{names:?}");

    let csv = dir.path().join("gamma.csv");
    assert!(run(&[
        "gamma-table",
        "--n-max",
        "10",
        "--out",
        csv.to_str().unwrap()
    ])
    .status
    .success());
    let m = manifest_for(&csv);
    assert_eq!(m["config"]["n_max"], 10);
    assert_eq!(m["outputs"][0]["bytes"], fs::read(&csv).unwrap().len());
}
