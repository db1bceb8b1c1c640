use std::path::Path;
use std::process::{Command, Output};

use clutch_opt::bench::{parse_results, OutputFormat, RecordStatus};
use clutch_opt::qubo::QuboModel;
use clutch_opt::stack::DiskStack;

fn cli(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clutch-opt"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

#[test]
fn generate_then_solve_each_solver() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["generate", "--nd", "4", "--ns", "6", "--seed", "12", "--out", "inst.txt"], dir.path());
    assert!(out.status.success());
    let stack = DiskStack::load(dir.path().join("inst.txt")).unwrap();
    assert_eq!((stack.n_disks(), stack.n_segments()), (4, 6));

    let mut ranges = Vec::new();
    for solver in ["exhaustive", "exact", "approx", "sa"] {
        let out = cli(&["solve", "--instance", "inst.txt", "--solver", solver, "--seed", "3"], dir.path());
        assert!(out.status.success(), "{solver}: {}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["solver"], solver);
        let shifts = v["solution"]["shifts"].as_array().unwrap();
        assert_eq!(shifts.len(), 4);
        assert_eq!(shifts[0], 0);
        ranges.push(v["solution"]["range"].as_f64().unwrap());
    }
    assert_eq!(ranges[0], ranges[1]);
    assert!(ranges[2] >= ranges[1] && ranges[3] >= ranges[1]);
}

#[test]
fn solve_exports_qubo() {
    let dir = tempfile::tempdir().unwrap();
    assert!(cli(&["generate", "--nd", "3", "--ns", "5", "--out", "i.txt"], dir.path()).status.success());
    let out = cli(
        &["solve", "--instance", "i.txt", "--solver", "sa", "--rho", "2.5", "--export-qubo", "q.txt"],
        dir.path(),
    );
    assert!(out.status.success());
    let model = QuboModel::import(dir.path().join("q.txt")).unwrap();
    assert_eq!(model.n_vars(), 10);
    assert_eq!(model.rho(), 2.5);
    assert!(model.gauge_fixed());
}

#[test]
fn bench_writes_jsonl_by_extension() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.toml"),
        "grid = [[2, 3], [3, 3]]\ninstances_per_size = 2\n\n[[solvers]]\nsolver = \"exact\"\n\n[[solvers]]\nsolver = \"exhaustive\"\ncap = 3\n",
    )
    .unwrap();
    let out = cli(&["bench", "--config", "cfg.toml", "--out", "r.jsonl"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read(dir.path().join("r.jsonl")).unwrap();
    let recs = parse_results(text.as_slice(), OutputFormat::Jsonl).unwrap();
    assert_eq!(recs.len(), 8);
    let skipped: Vec<_> = recs.iter().filter(|r| r.status == RecordStatus::Skipped).collect();
    assert_eq!(skipped.len(), 2);
    assert!(skipped.iter().all(|r| r.n_disks == 3 && r.solver == "exhaustive-range"));
}

#[test]
fn bench_to_stdout_as_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.toml"), "grid = [[2, 4]]\n[[solvers]]\nsolver = \"approx\"\n").unwrap();
    let out = cli(&["bench", "--config", "cfg.toml"], dir.path());
    assert!(out.status.success());
    let recs = parse_results(out.stdout.as_slice(), OutputFormat::Csv).unwrap();
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].n_vars, 4);
}

#[test]
fn configuration_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.toml"), "grid = [[2, 4]]\nsolvers = []\n").unwrap();
    let out = cli(&["bench", "--config", "empty.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no solvers"));

    let out = cli(&["solve", "--instance", "missing.txt", "--solver", "exact"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    let out = cli(&["solve", "--instance", "x", "--solver", "quantum"], dir.path());
    assert!(!out.status.success());
}
