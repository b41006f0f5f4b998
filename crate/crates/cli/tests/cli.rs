use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const REFERENCE: &str = r#"{"a":[1,9],"b":[2,6],"s":2}"#;

fn qrd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qrd(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

fn text_fields(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once(": "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn dyadic_text(v: &Value) -> String {
    let num = v["num"].as_i64().unwrap();
    let e = v["log2_den"].as_u64().unwrap();
    if e == 0 {
        num.to_string()
    } else {
        format!("{num}/{}", 1u64 << e)
    }
}

#[test]
fn density_prints_exact_and_decimal() {
    assert_eq!(stdout(&["density", "--tuple", REFERENCE]), "1/2\n0.5\n");
}

#[test]
fn render_matches_golden_files() {
    assert_eq!(
        stdout(&["render", "--gaps", "3,2,2", "--s", "8"]),
        golden("staircase_3_2_2_s8.txt")
    );
    let disjoint = r#"{"a":[1,1],"b":[2,3],"s":2}"#;
    assert_eq!(
        stdout(&["render", "--tuple", disjoint]),
        golden("no_blocks.txt")
    );
    assert_eq!(
        stdout(&["render", "--tuple", REFERENCE]),
        golden("reference_quotient.txt")
    );
}

#[test]
fn analyze_text_matches_golden_file() {
    assert_eq!(
        stdout(&["analyze", "--tuple", REFERENCE]),
        golden("reference_analyze.txt")
    );
}

#[test]
fn analysis_json_round_trips_byte_identical() {
    for t in [
        REFERENCE,
        r#"{"a":[2,3,6],"b":[2,3,6],"s":2}"#,
        r#"{"a":[1,3],"b":[1,4],"s":3}"#,
    ] {
        let json = stdout(&["analyze", "--tuple", t, "--format", "json"]);
        let parsed = qrd::DensityAnalysis::from_json(&json).unwrap();
        assert_eq!(parsed.to_json() + "\n", json);
    }
}

#[test]
fn text_and_json_agree() {
    for t in [
        REFERENCE,
        r#"{"a":[0,2,6,20,35],"b":[1,2,3,5,7],"s":2}"#,
        r#"{"a":[2,3,6],"b":[2,3,6],"s":2}"#,
    ] {
        let text = text_fields(&stdout(&["analyze", "--tuple", t]));
        let json: Value =
            serde_json::from_str(&stdout(&["analyze", "--tuple", t, "--format", "json"])).unwrap();
        for key in [
            "k",
            "mu",
            "d",
            "sigma_count",
            "signature_rank",
            "blocks",
            "cells",
        ] {
            assert_eq!(text[key], json[key].to_string(), "{t} {key}");
        }
        assert_eq!(text["formula_path"], json["formula_path"].as_str().unwrap());
        for key in ["density_plus", "density_minus"] {
            let exact = text[key].split(" = ").next().unwrap().to_string();
            assert_eq!(exact, dyadic_text(&json[key]), "{t} {key}");
        }
    }
}

#[test]
fn check_flag_passes_and_reports_every_check() {
    let out = stdout(&["analyze", "--tuple", REFERENCE, "--check"]);
    assert!(out
        .lines()
        .any(|l| l.starts_with("check kmax-two-paths: ok")));
    assert!(!out.contains("FAILED"));
    let json: Value = serde_json::from_str(&stdout(&[
        "analyze", "--tuple", REFERENCE, "--check", "--format", "json",
    ]))
    .unwrap();
    assert!(json["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] != false));
}

#[test]
fn tuple_may_come_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    std::fs::write(&path, REFERENCE).unwrap();
    assert_eq!(
        stdout(&["density", "--tuple", path.to_str().unwrap()]),
        "1/2\n0.5\n"
    );
}

#[test]
fn generate_builds_the_reference_tuple() {
    let out = stdout(&[
        "generate",
        "--spec",
        r#"{"gaps":[1],"seed":[1,2],"multipliers":[3]}"#,
        "--format",
        "json",
    ]);
    let json: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["tuple"]["a"], serde_json::json!([1, 9]));
    assert_eq!(json["tuple"]["b"], serde_json::json!([2, 6]));
    let out = stdout(&[
        "generate",
        "--spec",
        r#"{"blocks":[[1],[1]],"prime_mode":true}"#,
    ]);
    assert_eq!(text_fields(&out)["density_plus"], "1/4 = 0.25");
}

#[test]
fn qcount_accepts_signed_epsilon() {
    for eps in ["+1", "1", "-1"] {
        let out = stdout(&[
            "qcount",
            "--tuple",
            REFERENCE,
            "--prime",
            "1009",
            "--epsilon",
            eps,
        ]);
        assert!(text_fields(&out).contains_key("q_count"));
    }
}

#[test]
fn empirical_reports_allowable_denominator() {
    let out = stdout(&[
        "empirical",
        "--tuple",
        REFERENCE,
        "--bound",
        "10000",
        "--format",
        "json",
    ]);
    let json: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["prime_bound"], 10000);
    assert!(
        json["allowable_count"].as_u64().unwrap() <= json["primes_considered"].as_u64().unwrap()
    );
    let verbose = qrd(&["empirical", "--tuple", REFERENCE, "--bound", "100", "-v"]);
    let csv = String::from_utf8(verbose.stderr).unwrap();
    assert!(csv.starts_with("p,allowable,in_pi_plus\n3,false,false\n"));
}

#[test]
fn errors_exit_with_code_one_and_name_the_kind() {
    let out = qrd(&["analyze", "--tuple", r#"{"a":[1,9],"b":[2,6],"s":1}"#]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.starts_with("error[invalid-tuple]: invalid tuple: s must be at least 2"),
        "{err}"
    );
    let out = qrd(&[
        "qcount",
        "--tuple",
        REFERENCE,
        "--prime",
        "9",
        "--epsilon",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .starts_with("error[domain]"));
    let out = qrd(&["density", "--tuple", "/no/such/file.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_are_rejected() {
    assert_eq!(
        qrd(&["empirical", "--tuple", REFERENCE, "--bound", "10"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qrd(&[
            "qcount",
            "--tuple",
            REFERENCE,
            "--prime",
            "7",
            "--epsilon",
            "0"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(qrd(&["render", "--gaps", "1,2"]).status.code(), Some(2));
}
