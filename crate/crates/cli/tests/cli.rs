use std::path::Path;
use std::process::{Command, Output};

use clonesmith::closure::{screen_minimality, ClosureOptions, Screen};
use clonesmith::search::{CandidateSpace, SymmetryMode};

fn clonesmith(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clonesmith"))
        .args(args)
        .env_remove("CLONESMITH_CLOSURE_BOUND")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn closure_summaries() {
    for (name, line) in [
        ("f1", "members: 29, majority: 26"),
        ("m3", "members: 11, majority: 8"),
        ("m1", "members: 4, majority: 1"),
    ] {
        let o = clonesmith(&["closure", "--fixture", name]);
        assert!(o.status.success());
        assert_eq!(stdout(&o).trim(), line, "{name}");
    }
    let o = clonesmith(&["closure", "--fixture", "m3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["members"], 11);
    assert_eq!(v["majority"], 8);
}

#[test]
fn closure_bound_from_flag_and_environment() {
    let o = clonesmith(&["closure", "--fixture", "f1", "--closure-bound", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bound"));
    let o = Command::new(env!("CARGO_BIN_EXE_clonesmith"))
        .args(["closure", "--fixture", "f1"])
        .env("CLONESMITH_CLOSURE_BOUND", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn minimal_exit_codes() {
    let o = clonesmith(&["minimal", "--fixture", "f1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("minimal: yes"));

    let o = clonesmith(&["minimal", "--fixture", "f1_star"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("majority: 78"));

    // the first three-element candidate the screen refutes
    let space = CandidateSpace::new(3, SymmetryMode::All).unwrap();
    let op = (0..729)
        .map(|i| space.decode(i).unwrap())
        .find(|op| matches!(screen_minimality(op, ClosureOptions::default()), Ok(Screen::Refuted(_))))
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("op.json");
    std::fs::write(&path, op.to_json()).unwrap();
    let o = clonesmith(&["minimal", "--op", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample"));

    let proj = clonesmith::TernaryOp::projection(space.universe().clone(), 1).unwrap();
    std::fs::write(&path, proj.to_json()).unwrap();
    let o = clonesmith(&["minimal", "--op", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not a majority"));
}

#[test]
fn star_then_minimal() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m3star.json");
    let o = clonesmith(&["star", "--fixture", "m3", "--i", "1", "--format", "json"]);
    assert!(o.status.success());
    std::fs::write(&path, &o.stdout).unwrap();
    let o = clonesmith(&["minimal", "--op", path.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["minimal"], true);
    assert_eq!(v["majority_count"], 24);
}

#[test]
fn usage_errors() {
    let o = clonesmith(&["closure"]);
    assert_eq!(o.status.code(), Some(2));
    let o = clonesmith(&["closure", "--fixture", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown fixture"));
    let o = clonesmith(&["closure", "--op", "/definitely/not/here.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = clonesmith(&["search", "--n", "3", "--range", "5-9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn search_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("ckpt.json");
    let catalog = dir.path().join("hits.jsonl");
    let c = ckpt.to_str().unwrap();
    let o = clonesmith(&["search", "--n", "3", "--checkpoint", c, "--stop-after", "300", "--jobs", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("complete: false"));
    let o = clonesmith(&["search", "--n", "3", "--checkpoint", c, "--catalog", catalog.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("hits: 4"));
    let lines = std::fs::read_to_string(&catalog).unwrap();
    assert_eq!(lines.lines().count(), 4);

    std::fs::write(&ckpt, "{\"n\": 3, \"mode\"").unwrap();
    let o = clonesmith(&["search", "--n", "3", "--checkpoint", c]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("offset"));

    let o = clonesmith(&["search", "--n", "4", "--cyclic", "--range", "0..2000", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["complete"], true);
    assert_eq!(v["next_index"], "2000");
}

#[test]
fn relations_terms_and_restrictions() {
    let o = clonesmith(&["relpairs", "--fixture", "f1", "--seeds", "2:0,1:1b,0:2b"]);
    assert!(stdout(&o).starts_with("pairs: 7"));
    let o = clonesmith(&["term-eval", "--fixture", "f1", "--term", "d(x1,x2,d(x2,x1,x3))", "--format", "json"]);
    let got = clonesmith::TernaryOp::from_json(stdout(&o).trim()).unwrap();
    assert_eq!(&got, clonesmith::fixtures::get("g1_1_1b").unwrap());
    let o = clonesmith(&["term-shift", "--term", "d(d(x2,x1,x3),x2,x3)"]);
    let out = stdout(&o);
    assert!(out.contains("d1: ") && out.contains("d2: ") && out.contains("d3: "));
    let o = clonesmith(&["term-shift", "--term", "d(x1,x1,x2)"]);
    assert_eq!(o.status.code(), Some(2));
    let o = clonesmith(&["restrict", "--fixture", "M3", "--subset", "2,3,4", "--clone"]);
    assert!(stdout(&o).contains("injective: true"));
    let o = clonesmith(&["restrict", "--fixture", "M1", "--subset", "1,2,3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = clonesmith(&["canon", "--fixture", "f2", "--format", "json"]);
    let f2: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let o = clonesmith(&["canon", "--fixture", "f1", "--format", "json"]);
    let f1: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(f1["op"]["table"], f2["op"]["table"]);
}

fn export(dir: &Path) {
    let o = clonesmith(&["fixtures", "export", dir.to_str().unwrap()]);
    assert!(o.status.success());
}

#[test]
fn verify_paper_fast_criteria() {
    let o = clonesmith(&["verify-paper", "--only", "1,3,4,5,6,8,9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("PASS").count(), 7);
    assert!(stdout(&o).contains("all checks passed"));
}

#[test]
fn verify_paper_from_exported_files() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path());
    let d = dir.path().to_str().unwrap();
    let o = clonesmith(&["verify-paper", "--fixtures", d, "--only", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    // flip f1(1b,1,2b) from 1b to 2b
    let path = dir.path().join("f1.json");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let idx = (3 * 5 + 1) * 5 + 4;
    assert_eq!(v["table"][idx], 3);
    v["table"][idx] = 4.into();
    std::fs::write(&path, v.to_string()).unwrap();
    let o = clonesmith(&["verify-paper", "--fixtures", d, "--only", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL Table 3 / f1"), "{out}");
    assert!(out.contains("failing criteria: 4"), "{out}");

    std::fs::remove_file(dir.path().join("M2_3.json")).unwrap();
    let o = clonesmith(&["verify-paper", "--fixtures", d, "--only", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fixture missing"), "{}", stderr(&o));
}
