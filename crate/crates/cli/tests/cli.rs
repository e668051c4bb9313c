use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn permres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permres")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn run_ok(args: &[&str]) -> Value {
    let out = permres(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    v
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn pres_over_f9_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("witness.json");
    let v = run_ok(&["pres", "--group", "gf:9:poly=2,2,1", "--fn", "pow:2", "--out", path_str(&file)]);
    assert_eq!(v["pres"], 3);
    assert_eq!(v["witness_S"].as_array().unwrap().len(), 3);
    let check = run_ok(&["verify", "--model", "pres", "--assignment", path_str(&file)]);
    assert_eq!(check["passed"], true);
    assert_eq!(check["objective"], 3);
}

#[test]
fn corrupted_pres_assignment_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("witness.json");
    run_ok(&["pres", "--group", "gf:9:poly=2,2,1", "--fn", "pow:2", "--out", path_str(&file)]);
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let vars = doc["vars"].as_object_mut().unwrap();
    let key = vars.iter().find(|(k, v)| k.starts_with("x_") && **v == 1).map(|(k, _)| k.clone()).unwrap();
    vars.insert(key, Value::from(0));
    std::fs::write(&file, doc.to_string()).unwrap();
    let out = permres(&["verify", "--model", "pres", "--assignment", path_str(&file)]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["passed"], false);
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn missing_variables_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("partial.json");
    std::fs::write(&file, r#"{"group":"gf:3","fn":"pow:2","vars":{"y_0":1}}"#).unwrap();
    let out = permres(&["verify", "--model", "pres", "--assignment", path_str(&file)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn two_to_one_closed_form() {
    let v = run_ok(&["bound", "--group", "zn:16", "--two-to-one", "even"]);
    assert_eq!(v["bound"], 6);
    let g = run_ok(&["bound", "--group", "gf:9:poly=2,2,1", "--fn", "pow:2"]);
    assert_eq!((g["lower"].as_u64(), g["upper"].as_u64()), (Some(2), Some(5)));
}

#[test]
fn expectation_table_is_exact() {
    let v = run_ok(&["expect-bound", "--q", "9", "--v", "5"]);
    let values: Vec<&str> = v["values"].as_array().unwrap().iter().map(|r| r["value"].as_str().unwrap()).collect();
    assert_eq!(values, vec!["4", "3/2", "3/7"]);
    assert_eq!(v["min_k"], 3);
}

#[test]
fn cover_and_repair() {
    let v = run_ok(&["cover", "--group", "gf:9:poly=2,2,1", "--fn", "pow:2", "--set", "0,1,3", "--repair"]);
    assert_eq!(v["is_cover"], true);
    assert_eq!(v["repair"]["success"], true);
    let out = permres(&["cover", "--group", "gf:9:poly=2,2,1", "--fn", "pow:2", "--set", "0", "--repair"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["uncovered_rows"], serde_json::json!([3, 5, 6, 7]));
}

#[test]
fn greedy_trace() {
    let v = run_ok(&["greedy", "--group", "gf:9:poly=2,2,1", "--fn", "pow:2", "--steps", "2", "--strategy", "greedy"]);
    assert_eq!(v["range_is_group"], true);
    assert_eq!(v["size"], v["S"].as_array().unwrap().len());
}

#[test]
fn bruteforce_matches_exact() {
    let a = run_ok(&["bruteforce-pres", "--group", "gf:5", "--fn", "pow:2"]);
    let b = run_ok(&["pres", "--group", "gf:5", "--fn", "pow:2"]);
    assert_eq!(a["pres"], b["pres"]);
    assert_eq!(a["pres"], 3);
}

#[test]
fn lp_export_counts_and_stability() {
    let dir = tempfile::tempdir().unwrap();
    let pres_lp = dir.path().join("pres.lp");
    let v = run_ok(&["export-lp", "--model", "pres", "--group", "gf:3", "--fn", "pow:2", "--out", path_str(&pres_lp)]);
    assert_eq!(v["binary"], 9);
    let text = std::fs::read_to_string(&pres_lp).unwrap();
    let binaries = text.split("\nBinary\n").nth(1).unwrap().split("General").next().unwrap();
    let names: Vec<&str> = binaries.split_whitespace().collect();
    assert_eq!(names.len(), 9);

    let a = dir.path().join("a.lp");
    let b = dir.path().join("b.lp");
    run_ok(&["export-lp", "--model", "du", "--group", "zn:2", "--out", path_str(&a)]);
    run_ok(&["export-lp", "--model", "du", "--group", "zn:2", "--out", path_str(&b)]);
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    let general = text.split("\nGeneral\n").nth(1).unwrap().split("\nEnd").next().unwrap();
    let deltas = general.split_whitespace().filter(|n| n.starts_with("delta_")).count();
    assert_eq!(deltas, 2);
}

#[test]
fn du_min_witness_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("du.json");
    let v = run_ok(&["du-min", "--group", "gf:8", "--out", path_str(&file)]);
    assert_eq!(v["best_du"], 2);
    let check = run_ok(&["verify", "--model", "du", "--assignment", path_str(&file)]);
    assert_eq!(check["passed"], true);
    assert_eq!(check["du_claimed"], 2);
}

#[test]
fn du_product_bound() {
    let v = run_ok(&["du", "--group", "gf:9:poly=2,2,1", "--fn", "pow:2", "--g", "table:0,0,0,0,0,0,0,0,0"]);
    assert_eq!(v["differential_uniformity"], 1);
    assert_eq!(v["product_bound"]["holds"], true);
}

#[test]
fn repro_is_deterministic_and_matches() {
    let args = ["repro", "--table", "T3", "--max-p", "13"];
    let a = permres(&args);
    let b = permres(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["matches"], 5);
    assert_eq!(v["mismatches"], 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(permres(&["pres", "--group", "gf:9"]).status.code(), Some(2));
    assert_eq!(permres(&["pres", "--group", "zz:3", "--fn", "pow:2"]).status.code(), Some(2));
    assert_eq!(permres(&["repro", "--table", "T7"]).status.code(), Some(2));
    assert_eq!(permres(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn exhausted_search_exits_one() {
    let out = permres(&["pres", "--group", "gf:9:poly=2,2,1", "--fn", "pow:2", "--max-k", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["lower_bound"], 3);
}
