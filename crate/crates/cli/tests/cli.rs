use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    json: Value,
    stderr: String,
}

fn kanon(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_kanon")).args(args).output().expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    Run {
        code: out.status.code().unwrap(),
        json: serde_json::from_str(&stdout).unwrap_or(Value::Null),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn identical_rows_cost_nothing() {
    let dir = TempDir::new().unwrap();
    let db = file(&dir, "db.txt", "alphabet: 0 1\n0 1\n0 1\n0 1\n0 1\n");
    let r = kanon(&["anonymize", s(&db), "--k", "2", "--method", "simplex"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json["cost"], 0);
    assert_eq!(r.json["groups"].as_array().unwrap().len(), 2);
}

#[test]
fn triangle_incidence_table_costs_nine() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "k3.graph", "p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n");
    let db = dir.path().join("k3.db");
    let r = kanon(&["reduce", "--from", "graph", s(&g), "--out", s(&db)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    for method in ["brute", "dnc", "kernel"] {
        let r = kanon(&["anonymize", s(&db), "--k", "3", "--method", method]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert_eq!(r.json["cost"], 9, "{method}");
        assert_eq!(r.json["released"][0], "* * *");
    }
}

#[test]
fn opposed_clauses_have_no_partition() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "opposed.cnf", "c both all-positive and all-negative\np cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n");
    let g = dir.path().join("opposed.graph");
    assert_eq!(kanon(&["reduce", "--from", "1in3sat", s(&cnf), "--out", s(&g)]).code, 0);
    let r = kanon(&["oracle", "--problem", "edge-partition", s(&g)]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json["partition"], "none");
    let r = kanon(&["oracle", "--problem", "1in3sat", s(&cnf)]);
    assert_eq!((r.code, r.json["count"].as_u64()), (1, Some(0)));
}

#[test]
fn satisfiable_formula_round_trips_through_verify() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "mixed.cnf", "p cnf 3 2\n-1 2 3 0\n1 -2 3 0\n");
    let (g, reg, part) = (dir.path().join("g"), dir.path().join("reg.json"), dir.path().join("p"));
    let r = kanon(&["reduce", "--from", "1in3sat", s(&cnf), "--out", s(&g), "--registry-out", s(&reg)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json["triangle_free"], true);
    assert_eq!(r.json["structure_violations"].as_array().unwrap().len(), 0);
    let r = kanon(&["oracle", "--problem", "edge-partition", s(&g), "--partition-out", s(&part)]);
    assert_eq!(r.code, 0);
    let r = kanon(&["verify", "--graph", s(&g), "--partition", s(&part), "--registry", s(&reg)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json["valid"], true);
    assert_eq!(r.json["satisfies"], true);
    for g in r.json["gadgets"].as_array().unwrap() {
        assert_ne!(g["class"], "Invalid");
    }
}

#[test]
fn tripartite_triangle_diversifies() {
    let dir = TempDir::new().unwrap();
    let t = file(&dir, "t.graph", "p edge 3 3\ne 1 2\ne 1 3\ne 2 3\nv 1 0\nv 2 1\nv 3 2\n");
    let db = dir.path().join("t.db");
    assert_eq!(kanon(&["reduce", "--from", "tripartite-2div", s(&t), "--out", s(&db)]).code, 0);
    let r = kanon(&["diversify", s(&db), "--l", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json["cost"], 9);
    let r = kanon(&["diversify", s(&db), "--l", "2", "--s-cols", "3,4,5", "--q-cols", "0,1,2"]);
    assert_eq!(r.json["cost"], 9);
}

#[test]
fn matching_oracle_and_reduction() {
    let dir = TempDir::new().unwrap();
    let m = file(&dir, "m.3dm", "p 3dm 2 2 2 3\nt 1 1 1\nt 2 2 2\nt 1 2 2\n");
    let r = kanon(&["oracle", "--problem", "3dm", s(&m)]);
    assert_eq!(r.json["size"], 2);
    let db = dir.path().join("m.db");
    assert_eq!(kanon(&["reduce", "--from", "3dm3", s(&m), "--out", s(&db)]).code, 0);
    let r = kanon(&["anonymize", s(&db), "--k", "3", "--method", "dnc"]);
    // 27n - 3|M| with n = 6 and a perfect matching of size 2
    assert_eq!(r.json["cost"], 27 * 6 - 3 * 2);
}

#[test]
fn hierarchy_generalizes() {
    let dir = TempDir::new().unwrap();
    let db = file(&dir, "db", "alphabet: a b c\na\nb\nc\nc\n");
    let h = file(&dir, "h", "* 4\n  ab 1/2\n    a 0\n    b 0\n  c 0\n");
    let r = kanon(&["anonymize", s(&db), "--k", "2", "--method", "brute", "--hierarchy", s(&h)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json["cost"], 1);
    assert_eq!(r.json["released"][0], "ab");
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let db = file(&dir, "db", "alphabet: 0 1\n0 1\n1 1\n1 0\n");
    let r = kanon(&["anonymize", s(&db), "--k", "3", "--method", "simplex"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("simplex"));
    let starred = file(&dir, "starred", "alphabet: 0 1\n0 *\n");
    let r = kanon(&["anonymize", s(&starred), "--k", "1"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 2"));
    assert_eq!(kanon(&["anonymize", s(&db), "--k", "2", "--bogus"]).code, 2);
    let bad = file(&dir, "bad.3dm", "p 3dm 1 4 4 4\nt 1 1 1\nt 1 2 2\nt 1 3 3\nt 1 4 4\n");
    let r = kanon(&["oracle", "--problem", "3dm", s(&bad)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 5"));
}

#[test]
fn too_few_rows_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let db = file(&dir, "db", "alphabet: 0 1\n0 1\n1 1\n");
    let r = kanon(&["anonymize", s(&db), "--k", "3"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json["feasible"], false);
}
