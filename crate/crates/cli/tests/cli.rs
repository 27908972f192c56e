use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hds")).args(args).env_remove("HDS_FORMAT").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = hds(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn golden() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/five_two.json").display().to_string()
}

#[test]
fn enumerate_lists_orbits() {
    let out = ok(&["enumerate", "--n", "9", "--m", "3"]);
    assert!(out.starts_with("H̃(9,3): 2 reduced addable classes up to block permutation"));
    assert!(out.contains("((4^6,-5^3)^P,1^9,1^9)/9"));
    assert!(out.contains("((5^5,-4^4)^P,1^9,1^9)/9"));
    assert_eq!(ok(&["enumerate", "--n", "12", "--m", "3"]), "H̃(12,3) is maximal\n");
    let out = ok(&["enumerate", "--n", "3", "--m", "3", "--expanded"]);
    assert!(out.contains("((4,1,-2)^P,1^3,1^3)/3"));
    assert!(out.contains("((5,-1^2)^P,1^3,1^3)/3"));
}

#[test]
fn enumerate_json_keeps_every_arrangement() {
    let v: Value = serde_json::from_str(&ok(&["enumerate", "--n", "9", "--m", "3", "--format", "json"])).unwrap();
    assert_eq!(v[0]["reduced"].as_array().unwrap().len(), 6);
    assert_eq!(v[0]["reduced_orbits"].as_array().unwrap().len(), 2);
    assert!(v[0].get("expanded").is_none());
}

#[test]
fn classify_rows() {
    assert_eq!(ok(&["classify", "--m", "2", "--format", "csv"]), "n,d,total\n5,8,40\n");
    assert_eq!(
        ok(&["classify", "--m", "3", "--format", "csv"]),
        "n,d,total\n3,6,40\n5,12,200\n9,24,981\n11,30,1451\n"
    );
    assert_eq!(ok(&["classify", "--m", "4", "--n", "19", "--verify", "full", "--format", "csv"]), "n,d,total\n19,72,133381\n");
}

#[test]
fn classify_json_shape() {
    let v: Value = serde_json::from_str(&ok(&["classify", "--m", "2", "--n", "5", "--format", "json"])).unwrap();
    let r = &v[0];
    assert_eq!(r["maximal"], false);
    assert_eq!(r["classes"].as_array().unwrap().len(), 4);
    let a = &r["assembled"][0];
    assert_eq!(a["added"], 15);
    assert_eq!(a["total"], 40);
    assert_eq!(a["verified"], true);
    assert_eq!(a["pairs_checked"], 780);
    let v: Value = serde_json::from_str(&ok(&["classify", "--m", "2", "--n", "6", "--format", "json"])).unwrap();
    assert_eq!(v[0]["maximal"], true);
    assert_eq!(v[0]["largest_total"], 36);
}

#[test]
fn emitted_points_match_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["classify", "--m", "2", "--n", "5", "--emit-points", dir.path().to_str().unwrap()]);
    let emitted: Value = serde_json::from_slice(&std::fs::read(dir.path().join("m2-n5-0.json")).unwrap()).unwrap();
    let golden: Value = serde_json::from_slice(&std::fs::read(golden()).unwrap()).unwrap();
    assert_eq!(emitted, golden);
}

#[test]
fn verify_golden_corrupted_and_empty() {
    let out = ok(&["verify", &golden()]);
    assert!(out.starts_with("PASS: 40 points"), "{out}");

    let dir = tempfile::tempdir().unwrap();
    let mut v: Value = serde_json::from_slice(&std::fs::read(golden()).unwrap()).unwrap();
    // (1,1,1,1,1 | 2,2,2,2,-3) -> (1,1,1,1,1 | 2,2,2,-3,2) duplicates a point
    v["points"][8] = serde_json::json!([1, 1, 1, 1, 1, 2, 2, 2, -3, 2]);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let o = hds(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witness: Added(7) and Added(8) at squared distance 0"), "{}", stdout(&o));

    // a point off the admissible distances to H̃
    v["points"][8] = serde_json::json!([6, 1, 1, 1, -4, 2, 2, 2, 2, -3]);
    std::fs::write(&bad, v.to_string()).unwrap();
    let o = hds(&["verify", bad.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let cert: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cert["passed"], false);
    assert!(!cert["witness"].is_null());

    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"n":5,"m":2,"points":[]}"#).unwrap();
    assert!(ok(&["verify", empty.to_str().unwrap()]).starts_with("PASS: 25 points"));
}

#[test]
fn verify_points_with_extra_coordinate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("y.json");
    // Y_2^+ at n = 2: the pattern block (2, 0) in block one, height β² = 3/2
    let file = |sign: i8| {
        serde_json::json!({"n": 2, "m": 2, "root_points": [
            {"nums": [2, 0, 1, 1], "beta_num": 3, "beta_den": 2, "sign": sign},
            {"nums": [0, 2, 1, 1], "beta_num": 3, "beta_den": 2, "sign": sign},
        ]})
    };
    std::fs::write(&path, file(1).to_string()).unwrap();
    assert!(ok(&["verify", path.to_str().unwrap()]).starts_with("PASS: 6 points"));
    let mut mixed = file(1);
    mixed["root_points"][1]["sign"] = serde_json::json!(-1);
    std::fs::write(&path, mixed.to_string()).unwrap();
    assert_eq!(hds(&["verify", path.to_str().unwrap()]).status.code(), Some(1));
}

fn extended_sets(n: &str) -> Vec<(String, u64)> {
    let v: Value = serde_json::from_str(&ok(&["section6", "--n", n, "--format", "json"])).unwrap();
    v[0]["sets"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| (s["name"].as_str().unwrap().to_string(), s["size"].as_u64().unwrap()))
        .collect()
}

#[test]
fn section6_special_cases() {
    let five = extended_sets("5");
    let fifteen: Vec<_> = five.iter().filter(|s| s.1 == 15).map(|s| s.0.as_str()).collect();
    assert_eq!(fifteen, ["Y_2^+ ∪ Z_3^+", "Z_2^+ ∪ Y_3^+"]);
    let eight = extended_sets("8");
    let two: Vec<_> = eight.iter().filter(|s| s.1 == 2).map(|s| s.0.as_str()).collect();
    assert_eq!(two, ["X_1^+ ∪ X_9^-", "X_1^- ∪ X_9^+"]);
    let names: Vec<_> = extended_sets("2").into_iter().map(|s| s.0).collect();
    assert_eq!(names, ["X_1^+ ∪ X_1^-", "Y_2^+", "Y_2^-", "Z_2^+", "Z_2^-"]);
}

#[test]
fn cached_runs_match_fresh_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["classify", "--m", "2-4", "--format", "json"];
    let fresh = ok(&args);
    let with = |a: &[&str]| ok(&[a, &["--cache-dir", cache]].concat());
    assert_eq!(with(&args), fresh);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 15);
    assert_eq!(with(&args), fresh);
    // a different verification level is a different key
    with(&["classify", "--m", "2", "--verify", "fast"]);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 16);
}

#[test]
fn output_independent_of_threads() {
    let one = ok(&["classify", "--m", "3", "--format", "json", "--threads", "1"]);
    let four = ok(&["classify", "--m", "3", "--format", "json", "--threads", "4"]);
    assert_eq!(one, four);
}

#[test]
fn tables_and_bench() {
    let out = ok(&["tables", "--m", "2-3", "--format", "csv"]);
    assert_eq!(out, "# m = 2\nn,d,total\n5,8,40\n# m = 3\nn,d,total\n3,6,40\n5,12,200\n9,24,981\n11,30,1451\n");
    let out = ok(&["bench", "--m", "2"]);
    assert!(out.starts_with("n,m,total,seconds\n5,2,40,"), "{out}");
}

#[test]
fn environment_overrides() {
    let o = Command::new(env!("CARGO_BIN_EXE_hds"))
        .args(["classify", "--m", "2"])
        .env("HDS_FORMAT", "csv")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "n,d,total\n5,8,40\n");
    let o = Command::new(env!("CARGO_BIN_EXE_hds"))
        .args(["enumerate"])
        .env("HDS_N", "12")
        .env("HDS_M", "3")
        .env_remove("HDS_FORMAT")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "H̃(12,3) is maximal\n");
}

#[test]
fn exit_codes() {
    assert_eq!(hds(&["bogus"]).status.code(), Some(2));
    assert_eq!(hds(&["classify"]).status.code(), Some(2));
    assert_eq!(hds(&["enumerate", "--n", "1", "--m", "3"]).status.code(), Some(2));
    assert_eq!(hds(&["enumerate", "--n", "9-3", "--m", "3"]).status.code(), Some(2));
    assert_eq!(hds(&["classify", "--m", "2", "--clique-budget", "0"]).status.code(), Some(2));
    assert_eq!(hds(&["verify", "/nonexistent/file.json"]).status.code(), Some(2));
}
