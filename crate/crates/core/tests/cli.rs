use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kronfact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kronfact"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_solve_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("a.txt");
    let hidden = dir.path().join("hidden.json");
    let st = kronfact(&[
        "gen", "--dimB", "3", "--dimC", "4", "--seed", "7", "--out", path(&input), "--hidden",
        path(&hidden),
    ]);
    assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    let h: Value = serde_json::from_str(&fs::read_to_string(&hidden).unwrap()).unwrap();
    assert_eq!(h["p"].as_array().unwrap().len(), 12);

    let out = kronfact(&["solve", "--in", path(&input), "--dimB", "3", "--dimC", "4", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["success"], Value::Bool(true));
    assert_eq!(report["residual"], 0);
}

#[test]
fn unfactorizable_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("prime.txt");
    // 11 ones on a 6x6 matrix: no 2x3 split can produce that count
    fs::write(&input, "6\n111111\n100000\n100000\n100000\n100000\n100000\n").unwrap();
    let out = kronfact(&[
        "solve", "--in", path(&input), "--dimB", "2", "--dimC", "3", "--max-iter", "50",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no solution found"));
}

#[test]
fn oracle_lists_witnesses_for_edge_list_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.edges");
    // two disjoint 2-cycles, i.e. I2 ⊗ [[0,1],[1,0]]
    fs::write(&input, "4 4\n0 1\n1 0\n2 3\n3 2\n").unwrap();
    let out = kronfact(&["oracle", "--in", path(&input)]);
    assert!(out.status.success());
    let rows: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["n1"], 2);
    assert_eq!(rows[0]["composite"], Value::Bool(true));
    let found = rows[0]["witnesses"].as_array().unwrap().iter().any(|w| {
        w["b"] == serde_json::json!(["10", "01"]) && w["c"] == serde_json::json!(["01", "10"])
    });
    assert!(found);
}

#[test]
fn batch_writes_summary_and_runs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let runs = dir.path().join("r.jsonl");
    let out = kronfact(&[
        "batch", "--dimB", "3", "--dimC", "3", "--instances", "2", "--variations", "3", "--out",
        path(&csv), "--runs", path(&runs),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("rho_b,rho_c,rho_a,dim_b,dim_c"));
    assert!(lines.next().is_some());
    assert_eq!(fs::read_to_string(&runs).unwrap().lines().count(), 6);
}

#[test]
fn malformed_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.txt");
    fs::write(&input, "3\n01\n").unwrap();
    let out = kronfact(&["solve", "--in", path(&input), "--dimB", "1", "--dimC", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
