use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn jbw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jbw")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn structured(out: &Output) -> Value {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let v: Value = serde_json::from_str(&text).expect("structured output is JSON");
    assert_eq!(v["schema_version"], "1");
    v
}

const SQUARING_FORM: &str = r#"{
  "domain": {"factors": [{"kind": "real"}, {"kind": "real"}]},
  "codomain": {"factors": [{"kind": "real"}, {"kind": "real"}]},
  "sigma": [[0, 0], [1, 1]],
  "f_p": [{"kind": "power", "alpha": 2.0}, {"kind": "power", "alpha": 2.0}],
  "y": null,
  "J": null
}"#;

#[test]
fn analyze_lists_disengaged_atoms() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", r#"{"factors":[{"kind":"real"},{"kind":"real"},{"kind":"sym","n":3}]}"#);
    let out = jbw(&["analyze", "--algebra", p(&a), "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let v = structured(&out);
    assert_eq!(v["result"]["disengaged_atoms"].as_array().unwrap().len(), 2);
    assert_eq!(v["result"]["engaged"], serde_json::json!([{"kind": "sym", "n": 3}]));
    assert_eq!(v["result"]["center_dimension"], 3);

    let text = jbw(&["analyze", "--algebra", p(&a)]);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("disengaged atoms: 2"));
    assert!(text.contains("engaged part: Sym(3)"));
}

#[test]
fn factorize_identity() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", r#"{"factors":[{"kind":"sym","n":2}]}"#);
    let m = write(&dir, "m.json", r#"{"rows":3,"cols":3,"data":[1,0,0,0,1,0,0,0,1]}"#);
    let out = jbw(&["factorize", "--algebra", p(&a), "--map", p(&m), "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let v = structured(&out);
    let y: Vec<f64> = serde_json::from_value(v["result"]["y"].clone()).unwrap();
    assert_eq!(y, vec![1.0, 0.0, 1.0]);
    let j: Vec<f64> = serde_json::from_value(v["result"]["J"]["data"].clone()).unwrap();
    assert_eq!(j, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
}

#[test]
fn factorize_rejects_non_positive_map() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", r#"{"factors":[{"kind":"sym","n":2}]}"#);
    let m = write(&dir, "m.json", r#"{"rows":3,"cols":3,"data":[-1,0,0,0,-1,0,0,0,-1]}"#);
    let out = jbw(&["factorize", "--algebra", p(&a), "--map", p(&m)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("Te not in interior of cone"));
}

#[test]
fn malformed_inputs_exit_one() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"factors":[{"kind":"spin","n":1}]}"#);
    assert_eq!(jbw(&["analyze", "--algebra", p(&bad)]).status.code(), Some(1));
    let garbage = write(&dir, "g.json", "not json");
    assert_eq!(jbw(&["decompose", "--algebra", p(&garbage)]).status.code(), Some(1));
    assert_eq!(jbw(&["analyze", "--algebra", "/nonexistent/a.json"]).status.code(), Some(1));

    let a = write(&dir, "a.json", r#"{"factors":[{"kind":"sym","n":2}]}"#);
    let short = write(&dir, "x.json", "[1, 2]");
    let out = jbw(&["spectrum", "--algebra", p(&a), "--element", p(&short), "--format", "structured"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(structured(&out)["status"], "malformed_input");

    let m = write(&dir, "m.json", r#"{"rows":2,"cols":2,"data":[1,0,0,1]}"#);
    assert_eq!(jbw(&["factorize", "--algebra", p(&a), "--map", p(&m)]).status.code(), Some(1));
    assert_eq!(jbw(&["analyze"]).status.code(), Some(1));
}

#[test]
fn spectrum_of_diagonal_element() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", r#"{"factors":[{"kind":"sym","n":2}]}"#);
    let x = write(&dir, "x.json", "[3, 0, 1]");
    let out = jbw(&["spectrum", "--algebra", p(&a), "--element", p(&x), "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let v = structured(&out);
    let eig: Vec<f64> = serde_json::from_value(v["result"]["eigenvalues"].clone()).unwrap();
    assert!((eig[0] - 3.0).abs() < 1e-12 && (eig[1] - 1.0).abs() < 1e-12);
    assert_eq!(v["result"]["multiplicities"], serde_json::json!([1, 1]));
}

#[test]
fn decompose_emits_projections() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", r#"{"factors":[{"kind":"spin","n":2},{"kind":"real"}]}"#);
    let out = jbw(&["decompose", "--algebra", p(&a), "--format", "structured"]);
    let d = &structured(&out)["result"]["decomposition"];
    assert_eq!(d["p_d"], serde_json::json!([0.0, 0.0, 0.0, 1.0]));
    assert_eq!(d["p_e"], serde_json::json!([1.0, 0.0, 0.0, 0.0]));
    assert_eq!(d["disengaged_coordinates"], serde_json::json!([3]));
    assert_eq!(d["engaged"]["factor_indices"], serde_json::json!([0]));
}

#[test]
fn verify_oiso_on_squaring_form() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", SQUARING_FORM);
    let out = jbw(&["verify-oiso", "--form", p(&f), "--format", "structured", "--trials", "300"]);
    assert_eq!(out.status.code(), Some(0));
    let v = structured(&out);
    assert_eq!(v["result"]["order_preserving"], true);
    assert_eq!(v["result"]["linear"], false);
    assert_eq!(v["result"]["order_report"]["trials"], 300);
}

#[test]
fn verify_oiso_rejects_mismatched_form() {
    let dir = TempDir::new().unwrap();
    let form = SQUARING_FORM.replace(r#""codomain": {"factors": [{"kind": "real"}, {"kind": "real"}]}"#, r#""codomain": {"factors": [{"kind": "sym", "n": 2}]}"#);
    let f = write(&dir, "f.json", &form);
    let out = jbw(&["verify-oiso", "--form", p(&f)]);
    assert!(matches!(out.status.code(), Some(1) | Some(2)), "{:?}", out.status);
}

#[test]
fn demo_nonlinear_prints_witness() {
    let out = jbw(&["demo-nonlinear", "--grid", "8", "--lambda", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("witness"));
    assert!(text.contains("linear: false"));

    let out = jbw(&["demo-nonlinear", "--lambda=-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn structured_output_is_deterministic_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", SQUARING_FORM);
    for args in [
        vec!["verify-oiso", "--form", p(&f), "--seed", "7", "--trials", "200", "--format", "structured"],
        vec!["demo-nonlinear", "--seed", "3", "--trials", "100", "--format", "structured"],
    ] {
        let a = jbw(&args);
        let b = jbw(&args);
        assert_eq!(a.stdout, b.stdout);
        let v = structured(&a);
        let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, again);
    }
    let seq = jbw(&["verify-oiso", "--form", p(&f), "--seed", "7", "--trials", "200", "--format", "structured", "--backend", "sequential"]);
    let par = jbw(&["verify-oiso", "--form", p(&f), "--seed", "7", "--trials", "200", "--format", "structured", "--backend", "parallel"]);
    assert_eq!(seq.stdout, par.stdout);
}

#[test]
fn selftest_passes_every_criterion() {
    let out = jbw(&["selftest", "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let v = structured(&out);
    assert_eq!(v["result"]["passed"], 10);
    assert_eq!(v["result"]["criteria"].as_array().unwrap().len(), 10);
}
