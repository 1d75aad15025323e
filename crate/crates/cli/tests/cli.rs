use std::process::Command;

use hsgeom_cli::{result_digest, run, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};
use serde_json::Value;

fn hsgeom(args: &[&str]) -> hsgeom_cli::Outcome {
    run(std::iter::once("hsgeom").chain(args.iter().copied()))
}

fn strip_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing_ms");
    v
}

fn show(name: &str) -> Value {
    serde_json::from_str(&hsgeom(&["catalog", "show", name]).stdout).unwrap()
}

#[test]
fn ddc_exit_codes() {
    assert_eq!(hsgeom(&["ddc", "torus6", "--bidegree", "1,1"]).code, EXIT_PASS);
    let out = hsgeom(&["ddc", "iwasawa", "--bidegree", "2,0"]);
    assert_eq!(out.code, EXIT_FAIL);
    let v = out.json();
    assert_eq!(v["results"]["verdict"], false);
    assert!(v["witnesses"]["witness"]["coeffs"].is_object());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(hsgeom(&["frobnicate"]).code, EXIT_INPUT);
    assert_eq!(hsgeom(&["ddc", "torus6"]).code, EXIT_INPUT);
    assert_eq!(hsgeom(&["ddc", "torus6", "--bidegree", "1"]).code, EXIT_INPUT);
    assert_eq!(hsgeom(&["ddc", "torus6", "--bidegree", "4,0"]).code, EXIT_INPUT);
    assert_eq!(hsgeom(&["check", "no_such_model"]).code, EXIT_INPUT);
    assert_eq!(hsgeom(&["spectral", "iwasawa", "--form", "omega"]).code, EXIT_INPUT);
    assert_eq!(hsgeom(&["spectral", "torus6", "--form", "missing"]).code, EXIT_INPUT);
}

#[test]
fn help_goes_to_stdout() {
    let out = hsgeom(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("search-hs"));
}

#[test]
fn check_passes_on_catalog() {
    for name in ["torus6", "torus6_rot", "iwasawa", "kt_x_t2", "h5_x_r", "e2_x_r3"] {
        let out = hsgeom(&["check", name]);
        assert_eq!(out.code, EXIT_PASS, "{name}: {}", out.stdout);
    }
}

#[test]
fn cohomology_report_shape() {
    let v = hsgeom(&["cohomology", "iwasawa"]).json();
    assert_eq!(v["results"]["betti"], serde_json::json!([1, 4, 8, 10, 8, 4, 1]));
    assert_eq!(v["results"]["frolicher"]["degenerates_at_e1"], false);
}

#[test]
fn gauduchon_and_spectral() {
    let g = hsgeom(&["gauduchon", "torus6"]);
    assert_eq!(g.code, EXIT_PASS);
    assert_eq!(g.json()["results"]["b1"], 6);
    let s = hsgeom(&["spectral", "e2_x_r3", "--form", "exact_sample"]);
    assert_eq!(s.code, EXIT_PASS, "{}", s.stdout);
    assert_eq!(s.json()["results"]["exactness"]["holds"], true);
}

#[test]
fn digest_covers_results_and_witnesses() {
    let v = hsgeom(&["ddc", "iwasawa", "--bidegree", "2,0"]).json();
    assert_eq!(v["result_digest"], Value::String(result_digest(&v["results"], &v["witnesses"])));
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["check", "torus6_rot"],
        vec!["cohomology", "h5_x_r"],
        vec!["ddc", "kt_x_t2", "--bidegree", "1,1"],
        vec!["search-hs", "torus6", "--seed", "3"],
    ] {
        let a = strip_timing(hsgeom(&args).json());
        let b = strip_timing(hsgeom(&args).json());
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn report_replays_from_embedded_document() {
    let dir = tempfile::tempdir().unwrap();
    for (args, name) in [
        (vec!["cohomology", "iwasawa"], "iwasawa"),
        (vec!["ddc", "e2_x_r3", "--bidegree", "1,2"], "e2_x_r3"),
    ] {
        let first = hsgeom(&args).json();
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, serde_json::to_string(&first["model_document"]).unwrap()).unwrap();
        let mut replay_args = args.clone();
        let p = path.to_str().unwrap().to_string();
        replay_args[1] = &p;
        let second = hsgeom(&replay_args).json();
        assert_eq!(first["results"], second["results"]);
        assert_eq!(first["result_digest"], second["result_digest"]);
    }
}

#[test]
fn float_scalars_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = show("torus6");
    doc["forms"]["omega"]["coeffs"]["1,2"] = Value::String("0.5".into());
    let path = dir.path().join("float.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let out = hsgeom(&["check", path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("0.5"), "{}", out.stderr);
}

#[test]
fn unknown_field_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = show("torus6");
    doc["colour"] = Value::String("blue".into());
    let path = dir.path().join("extra.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let out = hsgeom(&["check", path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("colour"), "{}", out.stderr);
}

#[test]
fn jacobi_violation_names_triple() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = show("torus6");
    doc["structure_constants"] = serde_json::json!([[1, 2, 3, "1"], [1, 3, 1, "1"]]);
    let path = dir.path().join("jacobi.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let out = hsgeom(&["check", path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("(e1, e2, e3)"), "{}", out.stderr);
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"schema_version\": 1,\n  oops\n}").unwrap();
    let out = hsgeom(&["check", path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("line 3"), "{}", out.stderr);
}

#[test]
fn catalog_dir_override() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = show("iwasawa");
    doc["description"] = Value::String("overridden".into());
    std::fs::write(dir.path().join("iwasawa.json"), doc.to_string()).unwrap();
    let bin = env!("CARGO_BIN_EXE_hsgeom");
    let out = Command::new(bin)
        .args(["catalog", "show", "iwasawa"])
        .env("HSGEOM_CATALOG_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let shown: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(shown["description"], "overridden");

    let out = Command::new(bin).args(["catalog", "show", "iwasawa"]).env_remove("HSGEOM_CATALOG_DIR").output().unwrap();
    let shown: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_ne!(shown["description"], "overridden");
}

#[test]
fn binary_exit_codes_match_library() {
    let bin = env!("CARGO_BIN_EXE_hsgeom");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["ddc", "torus6", "--bidegree", "1,1"]), Some(0));
    assert_eq!(status(&["ddc", "iwasawa", "--bidegree", "2,0"]), Some(1));
    assert_eq!(status(&["nope"]), Some(2));
}
