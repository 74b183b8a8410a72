//! End-to-end checks of the binary's exit-code contract and output shapes.
//! Numeric behavior is covered by the library tests; here we only pin what
//! a scripting caller relies on.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn conevol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conevol"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

const SQUARE: &str = r#"{"dim": 2, "vertices": [[1, 1], [1, -1], [-1, 1], [-1, -1]]}"#;
const DIAMOND: &str = r#"{"dim": 2, "vertices": [[1, 0], [0, 1], [-1, 0], [0, -1]]}"#;

/// Canonical corpus written into a fresh directory.
fn gen_canonical(dir: &Path) -> PathBuf {
    let corpus = dir.join("corpus");
    let out = conevol(&["gen-corpus", "--out-dir", corpus.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    corpus
}

#[test]
fn check_scc_cube_holds_with_six_equality_cases() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = gen_canonical(tmp.path());
    let out = conevol(&["check-scc", corpus.join("cube-3.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["holds"], serde_json::Value::Bool(true));
    assert_eq!(v["equality_cases"].as_array().unwrap().len(), 6);
}

#[test]
fn check_scc_accepts_raw_measure_and_flags_violation() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = gen_canonical(tmp.path());
    let out = conevol(&[
        "check-scc",
        corpus.join("skewed-measure.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v = stdout_json(&out);
    assert_eq!(v["holds"], serde_json::Value::Bool(false));
}

#[test]
fn isotropize_witness_measure_exits_no_convergence() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = gen_canonical(tmp.path());
    let out = conevol(&[
        "isotropize",
        corpus.join("skewed-measure.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("concentration"), "diagnosis names the cause: {err}");
}

#[test]
fn isotropize_sheared_box_converges() {
    let tmp = tempfile::tempdir().unwrap();
    let sheared = write_file(
        tmp.path(),
        "sheared.json",
        r#"{"dim": 2, "vertices": [[2, 1], [0, -1], [-2, -1], [0, 1]]}"#,
    );
    let out = conevol(&["isotropize", sheared.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["converged"], serde_json::Value::Bool(true));
    assert!(v["residual"].as_f64().unwrap() <= 1e-8);
    assert!(!v["residual_trace"].as_array().unwrap().is_empty());
}

#[test]
fn gen_corpus_rejects_large_dimension() {
    let tmp = tempfile::tempdir().unwrap();
    let out = conevol(&[
        "gen-corpus",
        "--out-dir",
        tmp.path().join("x").to_str().unwrap(),
        "--n",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_corpus_hundred_random_bodies_rerun_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let args = |dir: &str| {
        vec![
            "gen-corpus".to_string(),
            "--out-dir".into(),
            tmp.path().join(dir).to_str().unwrap().into(),
            "--n".into(),
            "3".into(),
            "--count".into(),
            "100".into(),
        ]
    };
    for dir in ["a", "b"] {
        let argv: Vec<String> = args(dir);
        let refs: Vec<&str> = argv.iter().map(String::as_str).collect();
        assert_eq!(conevol(&refs).status.code(), Some(0));
    }
    let mut names: Vec<String> = fs::read_dir(tmp.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 100);
    assert_eq!(names[0], "random-3-000.json");
    for name in &names {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between reruns");
    }
}

#[test]
fn u_functional_box_sits_on_the_lower_bound() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = gen_canonical(tmp.path());
    let out = conevol(&[
        "u-functional",
        corpus.join("box-3.json").to_str().unwrap(),
        "--sigma-chain",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["ratio"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
    assert_eq!(v["parallelepiped_support"], serde_json::Value::Bool(true));
}

#[test]
fn distance_square_diamond_matches_closed_forms() {
    let tmp = tempfile::tempdir().unwrap();
    let a = write_file(tmp.path(), "square.json", SQUARE);
    let b = write_file(tmp.path(), "diamond.json", DIAMOND);
    let out = conevol(&[
        "distance",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--report-lemmas",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let hom = v["distance"]["delta_hom"].as_f64().unwrap();
    let vol = v["distance"]["delta_vol"].as_f64().unwrap();
    assert!((hom - std::f64::consts::LN_2).abs() <= 1e-12);
    assert!((vol - (6.0 - 4.0 * 2.0f64.sqrt())).abs() <= 1e-10);
    for (_, check) in v["lemmas"].as_object().unwrap() {
        assert_ne!(check["status"], serde_json::Value::String("VIOLATED".into()));
    }
}

#[test]
fn sections_prism_along_generator_is_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = gen_canonical(tmp.path());
    let axis = write_file(
        tmp.path(),
        "axis.json",
        r#"{"dim": 3, "basis": [[0, 0, 1]]}"#,
    );
    let out = conevol(&[
        "sections",
        corpus.join("prism-triangle.json").to_str().unwrap(),
        "--subspace",
        axis.to_str().unwrap(),
        "--resolution",
        "101",
        "--eta",
        "0.05",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v["divergence"]["mismatch_rel"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["eta"]["grad_ok"], serde_json::Value::Bool(true));
}

#[test]
fn verify_minkowski_homothets_reach_equality() {
    let tmp = tempfile::tempdir().unwrap();
    let a = write_file(tmp.path(), "square.json", SQUARE);
    let b = write_file(
        tmp.path(),
        "big.json",
        r#"{"dim": 2, "vertices": [[3, 3], [3, -3], [-3, 3], [-3, -3]]}"#,
    );
    let out = conevol(&["verify", "minkowski", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v["epsilon"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn probe_family_emits_csv_trend() {
    let tmp = tempfile::tempdir().unwrap();
    let fam = write_file(tmp.path(), "fam.json", r#"{"name": "taper-prism"}"#);
    let out = conevol(&["probe", "scc", "--family", fam.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tau,epsilon,delta_vol,delta_hom,coverage_min");
    assert_eq!(lines.len(), 6);
}

#[test]
fn probe_without_input_or_family_is_an_input_error() {
    let out = conevol(&["probe", "u"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_json_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write_file(tmp.path(), "bad.json", "{not json");
    for cmd in [["check-scc"], ["cvm"]] {
        let out = conevol(&[cmd[0], bad.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2));
    }
    let missing = tmp.path().join("absent.json");
    let out = conevol(&["cvm", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn direction_length_mismatch_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = gen_canonical(tmp.path());
    let out = conevol(&[
        "verify",
        "schwarz",
        corpus.join("cube-3.json").to_str().unwrap(),
        "--axis",
        "1,0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
