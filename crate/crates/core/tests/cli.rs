use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lieforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lieforge")).args(args).env_remove("LIEFORGE_TOL").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn reals(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn compose_spot_value() {
    let out = lieforge(&["compose", "paper6", "--x", "0,0,1,0,0,0", "--y", "0,0,0,0,1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let z = reals(&v["z"]);
    assert!((z[3] - std::f64::consts::LN_2).abs() < 1e-10);
    assert!((z[2] - 0.5).abs() < 1e-10 && (z[4] - 0.5).abs() < 1e-10);
    assert_eq!(v["method"], "adjoint-quadrature");
    assert!(v["residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn compose_heisenberg_and_abelian() {
    let v = json(&lieforge(&["compose", "heisenberg3", "--x", "1,0,0", "--y", "0,1,0"]));
    let z = reals(&v["z"]);
    assert!(z.iter().all(|c| (c - 1.0).abs() < 1e-12), "{z:?}");
    let v = json(&lieforge(&["compose", "abelian:4", "--x", "1,2,3,4", "--y", "-1,-2,0.5,0"]));
    assert_eq!(reals(&v["z"]), vec![0.0, 0.0, 3.5, 4.0]);
}

#[test]
fn compose_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let rep = write(
        dir.path(),
        "rep.json",
        r#"{"images": [[[0,1,0],[0,0,0],[0,0,0]], [[0,0,0],[0,0,1],[0,0,0]], [[0,0,1],[0,0,0],[0,0,0]]]}"#,
    );
    let args = ["heisenberg3", "--x", "0.3,-0.2,0.5", "--y", "-0.4,0.6,0.1"];
    let base = reals(&json(&lieforge(&[&["compose"], &args[..]].concat()))["z"]);
    let ode = json(&lieforge(&[&["compose"], &args[..], &["--method", "ode"]].concat()));
    let via = json(&lieforge(&[&["compose"], &args[..], &["--method", "rep", "--rep", &rep]].concat()));
    assert_eq!(ode["method"], "ode");
    assert_eq!(via["method"], "representation");
    for (a, b) in base.iter().zip(reals(&ode["z"])) {
        assert!((a - b).abs() < 1e-8);
    }
    for (a, b) in base.iter().zip(reals(&via["z"])) {
        assert!((a - b).abs() < 1e-10);
    }
    assert_eq!(lieforge(&[&["compose"], &args[..], &["--method", "rep"]].concat()).status.code(), Some(3));
}

#[test]
fn validate_reports_antisymmetry() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "bad.json",
        r#"{"name": "bad", "dim": 3, "brackets": [
            {"i": 1, "j": 2, "coefficients": {"3": 1}},
            {"i": 2, "j": 1, "coefficients": {"3": 1}}], "metadata": {}}"#,
    );
    let out = lieforge(&["validate", &f]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["valid"], false);
    assert_eq!(v["violations"][0]["kind"], "antisymmetry");
    assert!(!out.stderr.is_empty());
    // Loading the same file for a computation also fails validation.
    assert_eq!(lieforge(&["frame", &f, "--point", "0,0,0"]).status.code(), Some(1));
}

#[test]
fn validate_good_file_and_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "h.json",
        r#"{"name": "heis", "dim": 3, "labels": ["p", "q", "c"],
            "brackets": [{"i": 1, "j": 2, "coefficients": {"3": 1.0}}], "metadata": {"source": "test"}}"#,
    );
    let out = lieforge(&["validate", &f]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["valid"], true);
    let v = json(&lieforge(&["frame", &f, "--point", "0.5,1,0"]));
    assert_eq!(v["labels"][2], "c");
    assert_eq!(lieforge(&["validate", "paper6"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let args = ["inverse", "paper6", "--point", "0.1,-0.2,0.3,0.05,-0.1,0.2"];
    let a = lieforge(&args);
    let b = lieforge(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_output() {
    let out = lieforge(&["frame", "heisenberg3", "--point", "0.5,0,0", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("field,row,col,value"));
    assert!(text.lines().any(|l| l.starts_with("omega,2,1,")));
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(lieforge(&["compose", "paper6", "--x", "1,2"]).status.code(), Some(3));
    assert_eq!(lieforge(&["compose", "paper6", "--x", "1,2", "--y", "0,0"]).status.code(), Some(3));
    assert_eq!(lieforge(&["frame", "/no/such/file.json", "--point", "0"]).status.code(), Some(3));
    assert_eq!(lieforge(&["nonsense"]).status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_lieforge"))
        .args(["compose", "so3", "--x", "0,0,0", "--y", "0,0,0"])
        .env("LIEFORGE_TOL", "abc")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn numerical_failures_exit_2() {
    let out = lieforge(&["frame", "so3", "--point", "0,1.5707963267948966,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("chart"));
}

#[test]
fn coords_and_subgroup() {
    let v = json(&lieforge(&["coords", "paper6", "--to", "second", "--point", "0,0,0,1,0,0"]));
    assert!((reals(&v["point"])[3] - 1.0).abs() < 1e-10);
    let v = json(&lieforge(&["coords", "heisenberg3", "--to", "first", "--point", "1,2,3"]));
    let y = reals(&v["point"]);
    assert!((y[2] - 2.0).abs() < 1e-10);
    let v = json(&lieforge(&["subgroup", "paper6", "--direction", "0,0,0,1,0,0", "--t", "0.5"]));
    assert!((reals(&v["point"])[3] - 0.5).abs() < 1e-10);
    assert!(v["residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn homogeneous_commands() {
    let v = json(&lieforge(&["generators", "poincare-sub(1)", "--subalgebra", "v:0,0,1,2", "--point", "0,0,0.4"]));
    let x = v["generators"].as_array().unwrap();
    let x4 = x[2][3].as_f64().unwrap();
    assert!((x4 + 0.5 * (-0.4f64).exp()).abs() < 1e-12);
    assert_eq!(v["m"], 3);

    let v = json(&lieforge(&["action", "paper6", "--subalgebra", "4,5", "--q", "0,0,1,0", "--z", "0,0,0,1,0,0"]));
    assert!((reals(&v["psi"])[2] - (-2.0f64).exp()).abs() < 1e-10);
    assert_eq!(v["coset_indices"], serde_json::json!([1, 2, 3, 6]));

    assert_eq!(lieforge(&["generators", "paper6", "--subalgebra", "1,2", "--point", "0,0,0,0"]).status.code(), Some(1));
}

#[test]
fn catalog_list() {
    let v = json(&lieforge(&["catalog", "list"]));
    let keys: Vec<&str> = v["catalog"].as_array().unwrap().iter().map(|e| e["key"].as_str().unwrap()).collect();
    assert_eq!(keys, vec!["abelian", "heisenberg3", "so3", "paper6", "poincare-sub"]);
}
