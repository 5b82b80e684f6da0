//! End-to-end checks of the binary: exit-code contract, report shapes,
//! and byte-identical reruns.

use std::path::PathBuf;
use std::process::{Command, Output};

fn unsharp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unsharp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    path.to_str().unwrap().to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn poset_check_reports_and_exits_zero() {
    let out = unsharp(&["poset", "check", &fixture("diamond.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("complete lattice: true"));
    assert!(text.contains("algebraic: true"));
}

#[test]
fn poset_check_emits_dot() {
    let out = unsharp(&[
        "poset",
        "check",
        &fixture("diamond.json"),
        "--format",
        "dot",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("digraph"));
    assert!(text.contains("bot -> a"));
    assert!(
        !text.contains("bot -> top"),
        "DOT must be the transitive reduction"
    );
}

#[test]
fn schema_errors_exit_two() {
    let out = unsharp(&["poset", "check", &fixture("malformed.json")]);
    assert_eq!(out.status.code(), Some(2));
    let out = unsharp(&["poset", "check", &fixture("cycle.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("cycle"), "{err}");
}

#[test]
fn caps_exit_three() {
    let out = unsharp(&[
        "--cap-poset",
        "2",
        "poset",
        "check",
        &fixture("diamond.json"),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = unsharp(&[
        "--cap-dim",
        "2",
        "dasein",
        "value",
        "--matrix",
        &fixture("diag123.json"),
        "--contexts",
        &fixture("contexts123.json"),
        "--character",
        "V01:0",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn witness_passes_and_mutants_fail() {
    let out = unsharp(&["witness", "sec6", "--bound", "16"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("not continuous"));

    let out = unsharp(&[
        "witness",
        "sec6",
        "--bound",
        "16",
        "--atom",
        &fixture("tampered_atom.json"),
    ]);
    assert_eq!(out.status.code(), Some(1), "a failing witness exits 1");
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn ir_eval_round_trip() {
    let out = unsharp(&[
        "ir",
        "eval",
        "way-below",
        r#"{"lo":"0","hi":"3"}"#,
        r#"{"lo":"1","hi":"2"}"#,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "true");
    let out = unsharp(&[
        "ir",
        "eval",
        "sup-directed",
        r#"{"lo":"0","hi":"1"}"#,
        r#"{"lo":"2","hi":"3"}"#,
    ]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "a non-directed family is an input error"
    );
}

#[test]
fn dasein_value_table() {
    let out = unsharp(&[
        "dasein",
        "value",
        "--matrix",
        &fixture("diag123.json"),
        "--contexts",
        &fixture("contexts123.json"),
        "--character",
        "V01:1",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    // the coarse character over cells {1},{23} sees [2, 3]
    assert!(text.contains("[2, 3]"), "{text}");
}

#[test]
fn suite_reports_are_byte_identical() {
    let a = unsharp(&["suite", "all", "--seed", "42", "--format", "json"]);
    let b = unsharp(&["suite", "all", "--seed", "42", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(
        a.stdout, b.stdout,
        "same seed must reproduce the report byte for byte"
    );
    let text = unsharp(&["suite", "all", "--seed", "42"]);
    assert!(stdout(&text).contains("result: PASS"));
}
