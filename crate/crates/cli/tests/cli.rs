// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pisot-disc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn tribonacci_is_pure_discrete() {
    let o = run(&["check", "a->ab;b->ac;c->a"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PURE_DISCRETE"));
}

#[test]
fn reducible_matrix_fails_precondition() {
    let o = run(&["check", "a->ab;b->ab"]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("PRECONDITION_FAILED"));
    assert!(out.contains("not irreducible"));
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["check", "--help"]).status.code(), Some(0));
    assert_eq!(run(&[]).status.code(), Some(64));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["check", "a->ab;b"]).status.code(), Some(64));
    assert_eq!(run(&["family", "sk", "--k", "5..2"]).status.code(), Some(64));
}

#[test]
fn json_is_reproducible_without_meta() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = run(&["check", "a->ab;b->a", "--all-letters", "--no-meta", "--json", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let ta = fs::read(&a).unwrap();
    assert_eq!(ta, fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["schema"], "pisot-disc/interior-report/1");
    assert_eq!(v["status"], "PURE_DISCRETE");
    assert!(v.get("meta").is_none());
    assert!(v.get("millis").is_none());
}

#[test]
fn dot_files_per_letter() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["check", "a->ab;b->ac;c->a", "--all-letters", "--dot", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for c in ["a", "b", "c"] {
        let text = fs::read_to_string(dir.path().join(format!("interior_{c}.dot"))).unwrap();
        assert!(text.starts_with("digraph"));
    }
}

#[test]
fn interior_exports_automaton() {
    let dir = tempfile::tempdir().unwrap();
    let j = dir.path().join("int.json");
    let o = run(&["interior", "a->ab;b->a", "--letter", "b", "--json", j.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&j).unwrap()).unwrap();
    assert!(v["states"].as_u64().unwrap() > 0);
    assert!(stdout(&o).contains("letter: b"));
}

#[test]
fn zero_automaton_of_golden_ratio() {
    let o = run(&["zeroauto", "--poly", "X^2 - X - 1", "--digits", "-1;0;1", "--list", "3"]);
    assert_eq!(o.status.code(), Some(0));
    // Least significant digit first: -1 - β + β² = 0.
    assert!(stdout(&o).lines().any(|l| l == "[-1 -1 1]"));
    let o = run(&["zeroauto", "--poly", "[-1, 0, 1]", "--digits", "0;1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cut_and_project_prints_word() {
    let o = run(&["cutproject", "--dir", "1,1.618", "--offset", "0.1,0.3", "--n", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let w = stdout(&o);
    let w = w.trim();
    assert_eq!(w.len(), 30);
    assert!(w.chars().all(|c| c == 'a' || c == 'b'));
    assert_eq!(run(&["cutproject", "--dir", "1,2", "--offset", "0.1", "--n", "5"]).status.code(), Some(64));
}

#[test]
fn render_writes_image() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("t.svg");
    let o = run(&["render", "a->ab;b->ac;c->a", "--depth", "8", "--interior", "--out", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(&svg).unwrap().contains("<svg"));
    let ppm = dir.path().join("t.ppm");
    let o = run(&["render", "a->ab;b->ac;c->a", "--depth", "6", "--out", ppm.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read(&ppm).unwrap().starts_with(b"P6"));
}

#[test]
fn families_tables() {
    let dir = tempfile::tempdir().unwrap();
    let j = dir.path().join("slk.json");
    let o = run(&["family", "slk", "--k", "3..4", "--all-l", "--no-meta", "--json", j.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&j).unwrap()).unwrap();
    assert_eq!(v["schema"], "pisot-disc/family-slk/1");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    let o = run(&["family", "sk", "--k", "2..3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("interior"));
}

#[test]
fn sadic_report_for_one_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let j = dir.path().join("sadic.json");
    let o = run(&["--sequential", "sadic", "--prefix", "ttttt", "--max-k", "3", "--report", j.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&j).unwrap()).unwrap();
    assert_eq!(v["schema"], "pisot-disc/sadic-report/1");
    assert_eq!(v["l0_states"], 62);
    assert_eq!(v["meta"]["parallel"], false);
    assert_eq!(v["certificates"][0]["certificate"]["k"], 3);
}
