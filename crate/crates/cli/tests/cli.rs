use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn examples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/formats/examples")
}

fn jetcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetcount"))
        .args(args)
        .env_remove("JETCOUNT_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json_out(args: &[&str]) -> Value {
    let out = jetcount(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn example(name: &str) -> String {
    examples().join(name).to_string_lossy().into_owned()
}

#[test]
fn count_three_parabolas() {
    let v = json_out(&["count", "--arrangement", &example("three_parabolas.json"), "--k", "2"]);
    assert_eq!(v["format_version"], "1.0");
    assert_eq!(v["command"], "count");
    assert_eq!(v["config"]["k"], 2);
    assert_eq!(v["result"]["total"], 3);
}

#[test]
fn sharp_report_size() {
    let v = json_out(&["sharp", "--p", "3", "--k", "1"]);
    assert_eq!(v["result"]["size"], 18);
    assert_eq!(v["result"]["sum_m"], 54);
    assert_eq!(v["result"]["match"], true);
}

#[test]
fn lift_and_jet_of_the_circle() {
    let v = json_out(&["lift", "--curve", &example("circle.json"), "--k", "2"]);
    let gens = v["result"]["generators"].as_array().unwrap();
    assert_eq!(gens.len(), 3);
    assert_eq!(gens[2]["k"], 2);
    let j = json_out(&["jet", "--curve", &example("circle.json"), "--point", "0,1", "--k", "2"]);
    assert_eq!(j["result"]["z"], serde_json::json!(["0", "-1"]));
}

#[test]
fn tangency_of_circle_and_line() {
    let v = json_out(&[
        "tangency",
        "--first",
        &example("circle.json"),
        "--second",
        &example("line_y1.json"),
        "--point",
        "0,1",
        "--kmax",
        "3",
    ]);
    assert_eq!(v["result"]["order"], 1);
}

#[test]
fn malformed_json_exits_with_parse_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"curves\": [,]\n}").unwrap();
    let out = jetcount(&["count", "--arrangement", bad.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2, column"), "{err}");
}

#[test]
fn error_classes_map_to_exit_codes() {
    // p = 2 is below the admissible range for k = 1
    assert_eq!(jetcount(&["sharp", "--p", "2", "--k", "1"]).status.code(), Some(3));
    // a jet at a point off the curve
    let off = jetcount(&["jet", "--curve", &example("circle.json"), "--point", "1,1", "--k", "1"]);
    assert_eq!(off.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&off.stderr).contains("circle"));
    let dir = tempfile::tempdir().unwrap();
    let future = dir.path().join("future.json");
    std::fs::write(&future, r#"{"format_version":"2.0","field":{"kind":"Q"},"curves":[{"graph":[1]}]}"#).unwrap();
    assert_eq!(jetcount(&["count", "--arrangement", future.to_str().unwrap(), "--k", "1"]).status.code(), Some(2));
}

#[test]
fn emitted_arrangement_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let arr = dir.path().join("family.json");
    let arr_s = arr.to_str().unwrap();
    json_out(&["sharp", "--p", "5", "--k", "1", "--emit-arrangement", arr_s, "--quiet"]);
    let counted = json_out(&["count", "--arrangement", arr_s]);
    assert_eq!(counted["result"]["total"], 250);
    assert_eq!(counted["result"]["n"], 50);
    // 50 conics over F_5 need more lift samples than the field has points
    let fit = jetcount(&["fit", "--arrangement", arr_s, "--k", "1"]);
    assert_eq!(fit.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&fit.stderr).contains("C1[0,0]"));
}

#[test]
fn output_is_deterministic_and_respects_out_dir() {
    let a = jetcount(&["sharp", "--p", "5", "--k", "1", "--trials", "3", "--subsample-seed", "7"]);
    let b = jetcount(&["sharp", "--p", "5", "--k", "1", "--trials", "3", "--subsample-seed", "7", "--threads", "1"]);
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["config"]["threads"] = Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(a.stdout, jetcount(&["sharp", "--p", "5", "--k", "1", "--trials", "3", "--subsample-seed", "7"]).stdout);

    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_jetcount"))
        .args(["bound-scan", "--k", "1", "--n", "10,20", "--quiet"])
        .env("JETCOUNT_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("bound-scan.json")).unwrap()).unwrap();
    assert_eq!(written["result"]["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn fit_with_cascade() {
    let v = json_out(&["fit", "--arrangement", &example("three_parabolas.json"), "--k", "1", "--cascade"]);
    assert!(v["result"]["fit"]["minimality_certified"].as_bool().unwrap());
    assert_eq!(v["result"]["cascade"]["sum_curve_degrees"], 9);
    assert!(v["result"]["cascade"]["steps"].as_array().unwrap().len() >= 1);
}

#[test]
fn count_csv_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("points.csv");
    json_out(&[
        "count",
        "--arrangement",
        &example("three_parabolas.json"),
        "--csv",
        csv.to_str().unwrap(),
        "--quiet",
    ]);
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x,y,participants,excluded");
    assert_eq!(text.lines().nth(1).unwrap(), "0,0,y=x^2;y=x^2+x^3;y=x^2+x^4,");
}
