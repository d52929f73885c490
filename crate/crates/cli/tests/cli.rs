use std::process::{Command, Output};

use serde_json::Value;

fn barlax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_barlax")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn records(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

#[test]
fn normalize_prints_normal_form_then_trace() {
    let o = barlax(&["normalize", "d2_1 . d3_3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("d2_2 . d3_1"));
    assert!(lines.next().is_some_and(|l| l.trim_start().starts_with("1. at 0:")));

    let o = barlax(&["normalize", "d3_1 . s3_1"]);
    assert_eq!(stdout(&o).lines().next(), Some("id2"));
    let o = barlax(&["normalize", "id5"]);
    assert_eq!(stdout(&o).trim(), "id5");
}

#[test]
fn paths_of_the_worked_example() {
    let o = barlax(&["paths", "(d3_2 @2) (d2_1 @1) (d3_1 @1) (s3_0 @2) (d3_1 @2)"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("paths: 2\n"), "{out}");
    assert!(out.contains("inversions: 4\n"));
    assert!(out.contains("common length: 4\n"));
    assert_eq!(out.lines().filter(|l| l.starts_with("path ")).count(), 2);
}

#[test]
fn paths_with_three_colours() {
    let o = barlax(&["paths", "(d2_1 @1) (d2_1 @2) (d2_1 @3)"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("paths: 2\n") && out.contains("common length: 3\n"), "{out}");
}

#[test]
fn chi_of_two_inner_faces() {
    let o = barlax(&["chi", "d3_1", "d3_1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "(iota, 1^3)");
    let o = barlax(&["chi", "s2_1", "s2_0", "--k", "1", "--l", "3", "--v", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("kappa[1,3]"), "{}", stdout(&o));
}

#[test]
fn equations_pass_in_the_default_model() {
    let o = barlax(&["verify", "--suite", "equations", "--r", "2", "--max-size", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    assert!(!recs.is_empty());
    assert!(recs.iter().all(|r| r["verdict"] == "pass" && r["suite"] == "equations"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 failed"));
}

#[test]
fn lax_example_run() {
    let args = ["verify", "--suite", "lax", "--r", "2", "--max-dim", "3", "--seed", "7", "--trials", "50"];
    let o = barlax(&args);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    assert_eq!(recs.len(), 50);
    assert!(recs.iter().all(|r| r["verdict"] == "pass" && r["witness"]["report"]["diagram"] == true));
    assert!(recs.iter().all(|r| r["bounds"]["seed"] == 7));
}

#[test]
fn corrupted_interchange_fails_with_witness() {
    let o = barlax(&["verify", "--suite", "equations", "--model", "finset:r=2,split=1,corrupt", "--max-size", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let recs = records(&o);
    let failing: Vec<&Value> = recs.iter().filter(|r| r["verdict"] == "fail").collect();
    assert!(failing.iter().any(|r| r["instance"].as_str().unwrap().contains("eq=02")));
    assert!(failing.iter().all(|r| r["witness"]["sizes"].is_array()));
}

#[test]
fn reports_are_byte_identical_and_out_matches_stdout() {
    let args = ["verify", "--suite", "hexagon", "--r", "3", "--max-dim", "1"];
    let a = barlax(&args);
    let b = barlax(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.jsonl");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let c = barlax(&with_out);
    assert!(c.status.success());
    assert!(c.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn timing_adds_elapsed() {
    let plain = barlax(&["verify", "--suite", "segal", "--r", "2", "--max-dim", "2"]);
    let timed = barlax(&["verify", "--suite", "segal", "--r", "2", "--max-dim", "2", "--timing"]);
    assert!(records(&plain).iter().all(|r| r.get("elapsed_ms").is_none()));
    assert!(records(&timed).iter().all(|r| r["elapsed_ms"].is_number()));
}

#[test]
fn worker_count_does_not_change_the_report() {
    let args = ["verify", "--suite", "lemma43", "--r", "2", "--max-dim", "2"];
    let default = barlax(&args);
    let two = Command::new(env!("CARGO_BIN_EXE_barlax")).args(args).env("BARLAX_WORKERS", "2").output().unwrap();
    assert!(two.status.success());
    assert_eq!(default.stdout, two.stdout);
    let zero = Command::new(env!("CARGO_BIN_EXE_barlax")).args(args).env("BARLAX_WORKERS", "0").output().unwrap();
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn bad_input_exits_with_two() {
    for args in [
        vec!["verify", "--suite", "paths", "--max-dim", "0"],
        vec!["verify", "--suite", "nonsense"],
        vec!["verify", "--suite", "equations", "--r", "2", "--split", "3"],
        vec!["verify", "--suite", "lax", "--model", "free:r=2"],
        vec!["normalize", "d3_1 . s2_1"],
        vec!["paths", "(d3_2 @"],
    ] {
        let o = barlax(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"), "{args:?}");
    }
}
