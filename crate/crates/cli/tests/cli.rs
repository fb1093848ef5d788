use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumgames")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, value.to_string()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn figure1_graph(dir: &TempDir) -> PathBuf {
    let out = run(&["figure1"]);
    assert_eq!(out.status.code(), Some(0));
    write(dir, "figure1.json", &json_of(&out)["graph"])
}

#[test]
fn order_and_edge() {
    let out = run(&["order", "(0,0)", "(1)"]);
    assert_eq!((stdout(&out).trim(), out.status.code()), (">", Some(0)));
    let out = run(&["order", "(1)", "(0,0)"]);
    assert_eq!((stdout(&out).trim(), out.status.code()), ("<", Some(1)));
    let out = run(&["order", "(2)", "(2)"]);
    assert_eq!(stdout(&out).trim(), "=");

    let out = run(&["edge", "()", "0", "()"]);
    assert_eq!((stdout(&out).trim(), out.status.code()), ("no-edge", Some(1)));
    let out = run(&["edge", "()", "1", "()"]);
    assert_eq!((stdout(&out).trim(), out.status.code()), ("edge", Some(0)));
    let out = run(&["edge", "(0,0)", "-1", "(0)"]);
    assert_eq!((stdout(&out).trim(), out.status.code()), ("edge", Some(0)));
    assert_eq!(run(&["edge", "(x", "0", "()"]).status.code(), Some(2));
}

#[test]
fn satisfies_exit_codes() {
    let dir = TempDir::new().unwrap();
    let good =
        write(&dir, "good.json", &json!({"vertices": [{"id": "a"}], "edges": [{"from": "a", "to": "a", "weight": 1}]}));
    let bad =
        write(&dir, "bad.json", &json!({"vertices": [{"id": "a"}], "edges": [{"from": "a", "to": "a", "weight": 0}]}));
    assert_eq!(run(&["satisfies", s(&good)]).status.code(), Some(0));
    let out = run(&["satisfies", s(&bad), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["satisfies"], json!(false));
    assert_eq!(run(&["satisfies", "/nonexistent/graph.json"]).status.code(), Some(2));
}

#[test]
fn figure1_pipeline() {
    let dir = TempDir::new().unwrap();
    let graph = figure1_graph(&dir);
    assert_eq!(run(&["figure1", "--check"]).status.code(), Some(0));

    let out = run(&["nvalues", s(&graph), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let n = &json_of(&out)["values"];
    assert_eq!(n["v0"], json!(-1));
    assert_eq!(n["r4"], json!(4));

    let out = run(&["phi", s(&graph), "--method", "paper"]);
    assert_eq!(out.status.code(), Some(1));
    let paper = json_of(&out);
    assert_eq!(paper["failures"], json!([{"from": "v0", "to": "r1", "weight": 2}]));
    assert_eq!(paper["assignment"]["r1"], json!("(0,2)"));

    let paper_file = write(&dir, "paper.json", &paper);
    let out = run(&["verify-morphism", s(&graph), s(&paper_file)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("1 of 23 edges fail"));

    let out = run(&["phi", s(&graph), "--method", "fixpoint", "--report"]);
    assert_eq!(out.status.code(), Some(0));
    let fixed = json_of(&out);
    assert_eq!(fixed["failures"], json!([]));
    let fixed_file = write(&dir, "fixed.json", &fixed);
    let out = run(&["verify-morphism", s(&graph), s(&fixed_file), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["report"].as_array().unwrap().len(), 23);
}

#[test]
fn solve_round_trip() {
    let dir = TempDir::new().unwrap();
    let arena = write(
        &dir,
        "arena.json",
        &json!({
            "vertices": [{"id": "a", "owner": "Eve"}, {"id": "b", "owner": "Adam"}],
            "edges": [
                {"from": "a", "to": "a", "weight": 1},
                {"from": "a", "to": "b", "weight": 0},
                {"from": "b", "to": "a", "weight": -1},
                {"from": "b", "to": "b", "weight": 1}
            ]
        }),
    );
    for method in ["brute", "energy", "umeasure"] {
        let out = run(&["solve", s(&arena), "--method", method, "--json"]);
        assert_eq!(out.status.code(), Some(0), "{method}");
        let doc = json_of(&out);
        assert_eq!(doc["method"], json!(method));
        assert_eq!(doc["eve_region"], json!(["a", "b"]));
        assert_eq!(doc["certificates"], json!({"eve": "valid", "adam": "valid"}));
    }
    let out = run(&["solve", s(&arena), "--dot"]);
    assert!(stdout(&out).starts_with("digraph {"));

    let dead_end = write(&dir, "dead.json", &json!({"vertices": [{"id": "a", "owner": "Eve"}], "edges": []}));
    assert_eq!(run(&["solve", s(&dead_end)]).status.code(), Some(2));
}

#[test]
fn windows_and_words() {
    let out = run(&["fragment", "--max-len", "1", "--max-coord", "1", "--weights", "-1..1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 2);
    assert_eq!(run(&["monotone", "--max-len", "2", "--max-coord", "2", "--weights", "-2,0,2"]).status.code(), Some(0));

    let input = [3i64, 1, 4, 1, 5, 9];
    let text: Vec<String> = input.iter().map(i64::to_string).collect();
    let out = run(&["reduce", "--input", &text.join(",")]);
    assert_eq!(out.status.code(), Some(0));
    let word: Vec<i64> = stdout(&out).trim().split(',').map(|w| w.parse().unwrap()).collect();
    let mut sum = 0;
    for (j, w) in word.iter().enumerate() {
        sum += w;
        assert_eq!(sum, input[j + 1] - input[0]);
    }
}

#[test]
fn harness_findings_are_replayable() {
    let out = run(&["harness", "--exhaustive", "--max-vertices", "2", "--weights", "-1..1", "--max-out-degree", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["arenas_processed"], json!(1776));
    assert_eq!(doc["certified"], json!(1776));

    let dir = TempDir::new().unwrap();
    let replay = dir.path().join("replay");
    let out = run(&[
        "harness",
        "--exhaustive",
        "--max-vertices",
        "2",
        "--weights",
        "-1..1",
        "--max-out-degree",
        "2",
        "--weaken",
        "energy",
        "--max-findings",
        "1",
        "--replay-dir",
        s(&replay),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!json_of(&out)["findings"].as_array().unwrap().is_empty());
    let files: Vec<_> = std::fs::read_dir(&replay).unwrap().map(|e| e.unwrap().path()).collect();
    assert!(!files.is_empty());
    for file in files {
        let out = run(&["solve", s(&file), "--method", "brute", "--json"]);
        assert_eq!(out.status.code(), Some(0));
    }
}
