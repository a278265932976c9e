use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fuzzobs"))
        .args(args)
        .env_remove("FUZZOBS_MAX_N")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON object")
}

fn value<'a>(r: &'a Value, name: &str) -> &'a Value {
    &r["results"][name]["value"]
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn smear_writes_the_mixture_of_translates() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", r#"{"N": 4, "weights": [0.5, 0.5, 0.0, 0.0]}"#);
    let out = dir.path().join("e.json");
    let r = report(&["smear", "--measure", s(&m), "--n", "4", "--output", s(&out)]);
    assert_eq!(r["command"], "smear");
    assert_eq!(*value(&r, "dim"), 4);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    // E({x}) = (P({x}) + P({x - 1})) / 2: diagonal (x, x) and (x - 1, x - 1)
    for x in 0..4usize {
        let atom = doc["atoms"][x].as_array().unwrap();
        for w in 0..4usize {
            let want = if w == x || (w + 1) % 4 == x { 0.5 } else { 0.0 };
            assert_eq!(atom[w * 4 + w][0].as_f64().unwrap(), want, "atom {x}, entry {w}");
        }
    }
    let digest = hex::encode(Sha256::digest(std::fs::read(&m).unwrap()));
    assert_eq!(r["inputs"][s(&m)], Value::String(digest));
}

#[test]
fn smear_rejects_an_order_mismatch() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", r#"{"N": 4, "weights": [0.5, 0.5, 0.0, 0.0]}"#);
    let out = dir.path().join("e.json");
    let o = run(&["smear", "--measure", s(&m), "--n", "5", "--output", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sharp_observable_passes_every_check() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", r#"{"N": 3, "weights": [1.0, 0.0, 0.0]}"#);
    let e = dir.path().join("p.json");
    report(&["smear", "--measure", s(&m), "--multiplicity", "2", "--output", s(&e)]);
    let r = report(&["check", "--observable", s(&e)]);
    for flag in ["covariant", "norm_one", "regular", "coarsening_exists", "kernel_circulant", "info_equivalent"] {
        assert_eq!(*value(&r, flag), Value::Bool(true), "{flag}");
    }
    assert_eq!(*value(&r, "smearing_measure"), serde_json::json!([1.0, 0.0, 0.0]));
    assert!(r["timing_ms"].is_number());
    assert_eq!(r["tolerances"]["covariance"], 1e-10);
}

#[test]
fn uniform_smearing_fails_regularity_at_a_singleton() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", r#"{"N": 4, "weights": [0.25, 0.25, 0.25, 0.25]}"#);
    let e = dir.path().join("u.json");
    report(&["smear", "--measure", s(&m), "--output", s(&e)]);
    let r = report(&["check", "--observable", s(&e), "--regular"]);
    assert_eq!(*value(&r, "regular"), Value::Bool(false));
    assert_eq!(*value(&r, "regular_witness"), serde_json::json!([0]));
    assert!(r["results"].get("covariant").is_none());
}

#[test]
fn vanishing_transform_yields_a_witness() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", r#"{"N": 4, "weights": [0.5, 0.5, 0.0, 0.0]}"#);
    let r = report(&["witness", "--measure", s(&m)]);
    assert_eq!(*value(&r, "character"), 2);
    assert!(value(&r, "smeared_tv_gap").as_f64().unwrap() <= 1e-12);
    assert!(value(&r, "sharp_tv_gap").as_f64().unwrap() >= 0.05);

    let e = dir.path().join("e.json");
    report(&["smear", "--measure", s(&m), "--output", s(&e)]);
    let r = report(&["check", "--observable", s(&e), "--equiv"]);
    assert_eq!(*value(&r, "info_equivalent"), Value::Bool(false));
    assert_eq!(*value(&r, "zero_characters"), serde_json::json!([2]));
    assert!(value(&r, "witness_psi").is_array());

    let full = write(&dir, "f.json", r#"{"N": 3, "weights": [0.6, 0.3, 0.1]}"#);
    assert_eq!(run(&["witness", "--measure", s(&full)]).status.code(), Some(4));
}

#[test]
fn exit_codes_classify_failures() {
    let dir = TempDir::new().unwrap();
    let bad_json = write(&dir, "a.json", "{not json");
    assert_eq!(run(&["check", "--observable", s(&bad_json)]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["check", "--observable", s(&missing)]).status.code(), Some(2));
    let not_effect = write(
        &dir,
        "b.json",
        r#"{"N": 2, "dim": 1, "atoms": [[[1.5, 0.0]], [[-0.5, 0.0]]]}"#,
    );
    assert_eq!(run(&["check", "--observable", s(&not_effect)]).status.code(), Some(3));
    let unnormalized = write(&dir, "c.json", r#"{"N": 2, "weights": [0.5, 0.6]}"#);
    let out = dir.path().join("o.json");
    assert_eq!(
        run(&["smear", "--measure", s(&unnormalized), "--output", s(&out)]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["sg", "--a", "1.5", "--b", "0"]).status.code(), Some(3));
}

#[test]
fn non_translate_kernel_has_no_equivalence_decision() {
    let dir = TempDir::new().unwrap();
    let k = write(&dir, "k.json", r#"{"N": 2, "rows": [[0.9, 0.1], [0.3, 0.7]]}"#);
    let e = dir.path().join("e.json");
    let r = report(&["kernel", "--kernel", s(&k), "--output", s(&e)]);
    assert_eq!(*value(&r, "kernel_circulant"), Value::Bool(false));
    assert_eq!(*value(&r, "covariant"), Value::Bool(false));
    let r = report(&["check", "--observable", s(&e), "--coarsen"]);
    assert_eq!(*value(&r, "coarsening_exists"), Value::Bool(true));
    assert_eq!(*value(&r, "kernel_circulant"), Value::Bool(false));
    assert_eq!(run(&["check", "--observable", s(&e), "--equiv"]).status.code(), Some(4));
}

#[test]
fn subset_scans_are_capped() {
    let dir = TempDir::new().unwrap();
    let mut w = vec!["0.0"; 17];
    w[0] = "1.0";
    let m = write(&dir, "m.json", &format!(r#"{{"N": 17, "weights": [{}]}}"#, w.join(", ")));
    let e = dir.path().join("e.json");
    report(&["smear", "--measure", s(&m), "--output", s(&e)]);
    assert_eq!(run(&["check", "--observable", s(&e), "--norm1"]).status.code(), Some(5));
    let lifted = Command::new(env!("CARGO_BIN_EXE_fuzzobs"))
        .args(["check", "--observable", s(&e), "--norm1"])
        .env("FUZZOBS_MAX_N", "17")
        .output()
        .unwrap();
    assert!(lifted.status.success());
}

#[test]
fn toigo_matrix_breaks_the_unit_shift() {
    let dir = TempDir::new().unwrap();
    let c = dir.path().join("c.json");
    let r = report(&["torus", "toigo", "--k", "6", "--output", s(&c)]);
    assert_eq!(*value(&r, "valid"), Value::Bool(true));
    assert_eq!(*value(&r, "toeplitz"), Value::Bool(false));
    let r = report(&["torus", "toeplitz", "--cmatrix", s(&c)]);
    assert_eq!(*value(&r, "toeplitz"), Value::Bool(false));
    let shifts = value(&r, "unit_shift_violations").as_array().unwrap();
    assert!(shifts.contains(&serde_json::json!([2, 4, 1])));
    let r = report(&["torus", "commutator", "--cmatrix", s(&c), "--arcs", "8"]);
    assert!(value(&r, "commutator_with_sharp").as_f64().unwrap() > 1e-3);
    assert_eq!(run(&["torus", "herglotz", "--cmatrix", s(&c)]).status.code(), Some(4));
}

#[test]
fn two_atom_measure_round_trips_through_the_cli() {
    let dir = TempDir::new().unwrap();
    let m = write(
        &dir,
        "rho.json",
        r#"{"type": "atomic", "atoms": [{"angle": 0.0, "weight": 0.6}, {"angle": 3.141592653589793, "weight": 0.4}]}"#,
    );
    let c = dir.path().join("c.json");
    let r = report(&["torus", "from-measure", "--measure", s(&m), "--k", "16", "--output", s(&c)]);
    assert_eq!(*value(&r, "toeplitz"), Value::Bool(true));
    let r = report(&["torus", "validate", "--cmatrix", s(&c)]);
    assert_eq!(*value(&r, "valid"), Value::Bool(true));
    let r = report(&["torus", "herglotz", "--cmatrix", s(&c), "--mode", "caratheodory"]);
    assert!(value(&r, "moment_residual").as_f64().unwrap() < 1e-8);
    assert_eq!(value(&r, "measure")["atoms"].as_array().unwrap().len(), 2);
    let r = report(&["torus", "herglotz", "--cmatrix", s(&c), "--mode", "fejer", "--grid", "256"]);
    assert!(value(&r, "moment_residual").as_f64().unwrap() <= 1e-10);
    assert!(value(&r, "min_density").as_f64().unwrap() >= -1e-9);
    assert_eq!(
        run(&["torus", "herglotz", "--cmatrix", s(&c), "--mode", "fejer", "--grid", "20"]).status.code(),
        Some(4)
    );
}

#[test]
fn stern_gerlach_report() {
    let r = report(&["sg", "--a", "0.9", "--b", "0.1"]);
    assert_eq!(*value(&r, "regular"), Value::Bool(true));
    assert_eq!(*value(&r, "info_equivalent"), Value::Bool(true));
    assert_eq!(*value(&r, "norm_one"), Value::Bool(false));
    let norms = value(&r, "norms").as_array().unwrap();
    assert!((norms[0].as_f64().unwrap() - 0.9).abs() < 1e-15);
    let r = report(&["sg", "--a", "0.5", "--b", "0.5"]);
    assert_eq!(*value(&r, "trivial"), Value::Bool(true));
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", r#"{"N": 5, "weights": [0.1, 0.2, 0.3, 0.2, 0.2]}"#);
    let e = dir.path().join("e.json");
    report(&["smear", "--measure", s(&m), "--output", s(&e)]);
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing_ms");
        serde_json::to_string(&v).unwrap()
    };
    let a = strip(report(&["check", "--observable", s(&e)]));
    let b = strip(report(&["check", "--observable", s(&e)]));
    assert_eq!(a, b);
}

#[test]
fn pretty_summary_goes_to_stderr() {
    let out = run(&["--pretty", "sg", "--a", "1", "--b", "0"]);
    assert!(out.status.success());
    let _: Value = serde_json::from_slice(&out.stdout).unwrap();
    let text = String::from_utf8(out.stderr).unwrap();
    assert!(text.contains("sharp") && text.contains("true"));
}
