use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use trifree::harness::RunSummary;

fn trifree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trifree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_three_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let out = trifree(&["run", "--n", "3", "--seed", "0", "--stop", "saturation", "--out", path_str(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: RunSummary = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary.final_step, 2);
    assert!(summary.saturated);
    assert_eq!(summary.final_edge_count, 2);

    let log = fs::read_to_string(dir.path().join("edges.log")).unwrap();
    let lines: Vec<&str> = log.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("1 ") && lines[1].starts_with("2 "));

    // the file on disk round-trips to the printed summary
    let on_disk: RunSummary =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(on_disk, summary);

    let csv = fs::read_to_string(dir.path().join("checkpoints.csv")).unwrap();
    assert!(csv.starts_with("step,t,Q,"));
    assert_eq!(csv.lines().count(), 1 + summary.checkpoint_count);
}

#[test]
fn horizon_stop_ends_at_m() {
    let out = trifree(&["run", "--n", "2000", "--seed", "7", "--stop", "horizon:1", "--y-samples", "10"]);
    assert!(out.status.success());
    let summary: RunSummary = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary.horizon_m, 7705);
    assert_eq!(summary.final_step, 7705);
    assert_eq!(summary.final_edge_count, summary.final_step);
    assert!(!summary.saturated);
}

#[test]
fn same_seed_same_edge_log() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = trifree(&["run", "--n", "300", "--seed", "42", "--y-samples", "10", "--out", path_str(dir.path())]);
        assert!(out.status.success());
    }
    let la = fs::read(a.path().join("edges.log")).unwrap();
    let lb = fs::read(b.path().join("edges.log")).unwrap();
    assert!(!la.is_empty());
    assert_eq!(la, lb);
    let other = tempfile::tempdir().unwrap();
    trifree(&["run", "--n", "300", "--seed", "43", "--y-samples", "10", "--out", path_str(other.path())]);
    assert_ne!(fs::read(other.path().join("edges.log")).unwrap(), la);
}

#[test]
fn invalid_pattern_fails_before_simulating() {
    let dir = tempfile::tempdir().unwrap();
    let pattern = dir.path().join("triangle.txt");
    fs::write(&pattern, "3 3\n0 1\n1 2\n0 2\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = trifree(&[
        "run", "--n", "100", "--pattern", path_str(&pattern), "--out", path_str(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not triangle-free"), "{err}");
    assert!(!out_dir.join("summary.json").exists());

    let check = trifree(&["pattern-check", path_str(&pattern)]);
    assert_eq!(check.status.code(), Some(1));
}

#[test]
fn pattern_check_reports_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let pattern = dir.path().join("c4.txt");
    fs::write(&pattern, "# four-cycle\n4 4\n0 1\n1 2\n2 3\n0 3\n").unwrap();
    let out = trifree(&["pattern-check", path_str(&pattern)]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("k=4 e=4 dense=false e>=3k=false"), "{text}");
}

#[test]
fn sweep_writes_one_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = trifree(&[
        "sweep", "--n", "40,60", "--n", "1", "--seeds", "3", "--y-samples", "5", "--out", path_str(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let status = headers.iter().position(|h| h == "status").unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows.iter().filter(|r| &r[status] == "error").count(), 3);
    assert!(dir.path().join("sweep_grid.csv").exists());
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(trifree(&["run"]).status.code(), Some(1));
    assert_eq!(trifree(&["run", "--n", "10", "--stop", "forever"]).status.code(), Some(1));
    assert_eq!(trifree(&["run", "--n", "1"]).status.code(), Some(1));
    assert_eq!(trifree(&["audit", "--n", "9", "--oracle"]).status.code(), Some(1));
    assert_eq!(trifree(&["--help"]).status.code(), Some(0));
}

#[test]
fn audit_passes_on_a_correct_engine() {
    let out = trifree(&["audit", "--n", "100", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 failing"));
    let out = trifree(&["audit", "--n", "4", "--oracle", "--trials", "20000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
