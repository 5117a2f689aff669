use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn lawcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lawcat")).args(args).output().expect("run lawcat")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = lawcat(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

#[test]
fn check_quantale_file() {
    let out = lawcat(&["check", &fixture("two.quantale")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("status: pass"));
    let (code, v) = json(&["check", &fixture("not_associative.quantale")]);
    assert_eq!(code, 1);
    assert!(v["report"]["violation"].as_str().unwrap().contains("distribute"));
}

#[test]
fn undefined_label_is_a_parse_error_with_location() {
    let out = lawcat(&["check", &fixture("bad_label.quantale")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad_label.quantale:3:"), "{err}");
    assert!(err.contains("undefined element `2`"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(lawcat(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lawcat(&["complete"]).status.code(), Some(2));
    assert_eq!(lawcat(&["check", "/nonexistent/file.vcat"]).status.code(), Some(2));
}

#[test]
fn space_check_json() {
    let (code, v) = json(&["check", &fixture("sierpinski.space")]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["report"]["opens"].as_array().unwrap().len(), 3);
}

#[test]
fn completeness_verdicts() {
    let (code, v) = json(&["complete", &fixture("arrow.vcat")]);
    assert_eq!((code, v["report"]["verdict"].as_str()), (0, Some("complete")));
    let (code, v) = json(&["complete", &fixture("discrete.vcat")]);
    assert_eq!((code, v["report"]["verdict"].as_str()), (1, Some("incomplete")));
    assert_eq!(v["report"]["witnesses"]["total"], 2);
    let (_, r) = json(&["complete", "--oracle", &fixture("discrete.vcat")]);
    assert_eq!(r["report"]["details"], v["report"]["details"]);
}

#[test]
fn builtin_v_hom() {
    let (code, v) = json(&["complete", "--builtin", "v-hom", "--quantale", "plus3"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["verdict"], "complete");
    assert_eq!(v["report"]["certificate"]["precondition"], true);
}

#[test]
fn gate_failure_is_distinct() {
    let (code, v) = json(&["complete", "--builtin", "v-hom", "--quantale", "2", "--monad", "powerset"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "gate-failed");
}

#[test]
fn quniform_side_by_side() {
    let (code, v) = json(&["quniform", "complete", &fixture("line.quniform")]);
    assert_eq!(code, 0);
    let r = &v["report"];
    assert_eq!(r["lawvere_complete"], r["cauchy_complete"]);
    assert_eq!(r["agree"], true);
    let (code, _) = json(&["complete", &fixture("indiscrete3.quniform")]);
    assert_eq!(code, 0);
}

#[test]
fn sober_and_yoneda_and_dual() {
    let (code, v) = json(&["sober", &fixture("four_cycle.space")]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["weakly_sober"], v["report"]["lawvere_complete"]);
    assert_eq!(json(&["yoneda", &fixture("chain.tvcat")]).0, 0);
    assert_eq!(json(&["yoneda", &fixture("metric.vcat")]).0, 0);
    let (code, v) = json(&["dual", &fixture("pair.tvcat")]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["structure"]["rows"].as_array().unwrap().len(), 16);
}

#[test]
fn extend_prints_the_lifted_structure() {
    let (code, v) = json(&["extend", &fixture("arrow.vcat"), "--monad", "powerset", "--samples", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["extension"]["columns"].as_array().unwrap().len(), 4);
}

#[test]
fn suite_subset_and_budget() {
    let (code, v) = json(&["suite", "--only", "yoneda"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["items"].as_array().unwrap().len(), 1);
    let (code, v) = json(&["suite", "--only", "adjoint-maps", "--only", "quantale", "--max-enum", "1000"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["skipped"], 1);
    let (code, _) = json(&["suite", "--only", "adjoint-maps", "--max-enum", "1000", "--strict"]);
    assert_eq!(code, 1);
}

#[test]
fn report_round_trips() {
    let (_, v) = json(&["complete", &fixture("metric.vcat")]);
    let text = serde_json::to_string(&v).unwrap();
    let again: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v, again);
    assert_eq!(json(&["complete", &fixture("metric.vcat")]).1, v);
}
