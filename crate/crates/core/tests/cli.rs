use std::process::{Command, Output};

use partial_search::report::{parse_csv, parse_json, HEADER};
use partial_search::sweep::instances;
use partial_search::Status;

const BIN: &str = env!("CARGO_BIN_EXE_partial-search");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("run binary")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn plan_four_by_four_solves() {
    let out = run(&["plan", "4", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("sure-success plan: 1 global + 1 local + 1 final"));
    let csv_start = text
        .find(&HEADER.join(","))
        .expect("record follows the summary");
    let records = parse_csv(&text[csv_start..]).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].status, Status::Solved);
    assert!(records[0].full_rem_prob.unwrap() < 1e-9);
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["plan", "1", "4"][..],
        &["plan", "4", "1"],
        &["plan", "4"],
        &["plan", "4", "x"],
        &["sweep", "--max-n", "3"],
        &["sweep", "--format", "xml"],
        &["certify", "2", "2", "--solution-index", "4"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).status.code(), Some(64), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_json_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.json");
    let out = run(&[
        "sweep",
        "--max-n",
        "60",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let records = parse_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(records.len(), instances(60).len());
    let pairs: Vec<(usize, usize)> = records.iter().map(|r| (r.blocks, r.b)).collect();
    assert_eq!(pairs, instances(60));
    let footer = String::from_utf8(out.stderr).unwrap();
    assert!(footer.contains("unexpected-failure: 0"));
    assert!(footer.contains("extra global steps"));
}

#[test]
fn sweep_csv_respects_cert_cap() {
    let out = run(&["sweep", "--max-n", "100", "--cert-cap", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let records = parse_csv(&stdout(&out)).unwrap();
    for r in &records {
        assert_eq!(
            r.full_rem_prob.is_some(),
            r.size <= 20,
            "K={} b={}",
            r.blocks,
            r.b
        );
        if let (Some(full), Some(sub)) = (r.full_rem_prob, r.subspace_rem_prob) {
            assert!(full < 1e-9 && (full - sub).abs() < 1e-9);
        }
    }
}

#[test]
fn certify_reports_two_blocks() {
    let out = run(&["certify", "5", "7", "--solution-index", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("solution index 12 (block 1)"));
    assert!(text.contains("solution index 19 (block 2)"));
    assert!(text.trim_end().ends_with("certified"));
}
