use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn phaseret(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phaseret"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("phaseret-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("certificate JSON on stdout")
}

const MERCEDES: &str =
    r#"{"dim": 2, "field": "exact", "vectors": [["1","0"],["0","1"],["1","1"]]}"#;
const TILTED: &str = r#"{"dim": 2, "field": "float",
  "subspaces": [{"basis": [[1, 0]]}, {"basis": [[0.7071067811865476, 0.7071067811865476]]}]}"#;
const DUPLICATED: &str = r#"{"dim": 3, "field": "exact", "vectors":
  [["1","0","0"],["1","0","0"],["0","1","0"],["0","0","1"],["1","1","1"],["1","2","3"]]}"#;

#[test]
fn three_vectors_in_the_plane_do_phase_retrieval() {
    let f = write("mercedes.json", MERCEDES);
    let out = phaseret(&["pr-vectors", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "YES");
    assert_eq!(v["command"], "pr-vectors");
    assert_eq!(v["inputs_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn tilted_lines_fail_norm_retrieval_with_a_pair() {
    let f = write("tilted.json", TILTED);
    let out = phaseret(&["nr-cert", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["verdict"], "NO");
    assert_eq!(v["witness"]["kind"], "pair");
    assert!(v["witness"]["pair"]["measurement_gap"].as_f64().unwrap() <= 1e-9);
    assert!(v["witness"]["pair"]["norm_gap"].as_f64().unwrap() >= 1e-6);
}

#[test]
fn duplicated_vector_has_spark_two() {
    let f = write("dup.json", DUPLICATED);
    let out = phaseret(&["spark", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["witness"]["spark"], 2);
    assert_eq!(v["witness"]["dependent_subset"], serde_json::json!([0, 1]));
}

#[test]
fn output_is_byte_stable() {
    let f = write("stable.json", DUPLICATED);
    let path = f.to_str().unwrap();
    for args in [
        vec!["pr-vectors", path],
        vec!["abc-suite", "--trials", "5", "--seed", "3", path],
        vec!["example", "pop-generic", "--seed", "4"],
    ] {
        let a = phaseret(&args);
        let b = Command::new(env!("CARGO_BIN_EXE_phaseret"))
            .args(&args)
            .env("THREADS", "1")
            .output()
            .unwrap();
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}

#[test]
fn no_certificates_replay_through_verify() {
    let s = write("replay-s.json", TILTED);
    let cert = phaseret(&["nr-cert", s.to_str().unwrap()]);
    let c = write(
        "replay-cert.json",
        std::str::from_utf8(&cert.stdout).unwrap(),
    );
    let out = phaseret(&["verify", c.to_str().unwrap(), s.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["method"], "WITNESS_REPLAY");

    // A wrong input file is refused by digest.
    let other = write("replay-other.json", MERCEDES);
    let out = phaseret(&["verify", c.to_str().unwrap(), other.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn exit_codes_for_errors_and_unknowns() {
    assert_eq!(phaseret(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(phaseret(&["example", "nope"]).status.code(), Some(64));
    assert_eq!(
        phaseret(&["spark", "/nonexistent/f.json"]).status.code(),
        Some(65)
    );
    let bad = write(
        "bad.json",
        r#"{"dim": 2, "field": "exact", "vectors": [["1"]]}"#,
    );
    assert_eq!(
        phaseret(&["cp", bad.to_str().unwrap()]).status.code(),
        Some(65)
    );
    let dup = write("guard.json", DUPLICATED);
    assert_eq!(
        phaseret(&["--max-m", "3", "spark", dup.to_str().unwrap()])
            .status
            .code(),
        Some(64)
    );
    // {span e₁, span e₂} retrieves norms, so the search finds nothing.
    let orth = write(
        "orth.json",
        r#"{"dim": 2, "field": "exact", "subspaces": [{"basis": [["1","0"]]}, {"basis": [["0","1"]]}]}"#,
    );
    let out = phaseret(&["nr-falsify", "--restarts", "4", orth.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["verdict"], "UNKNOWN");
}

#[test]
fn examples_all_pass() {
    for name in [
        "duplicate-vector",
        "free-measurement",
        "pop-generic",
        "naimark-bounds",
    ] {
        let out = phaseret(&["example", name]);
        assert_eq!(out.status.code(), Some(0), "{name}");
    }
}
