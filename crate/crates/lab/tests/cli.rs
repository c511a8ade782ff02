use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lmsd_core::batch::Execution;
use lmsd_core::sweeps::{Event, Method};
use lmsd_lab::summary::{parse_summary, FILE_NAME};
use lmsd_lab::trace_csv::HEADER;
use lmsd_lab::{compare_methods, execute, load_trace, parse_config, run_experiment, LabError};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lmsd-lab")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.cfg");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_writes_traces_and_consistent_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "# defaults otherwise\nseed = 4\n");
    let out = dir.path().join("out");
    let res = lab(&["run", "--config", &cfg, "--method", "bb", "--method", "lmsdc", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let (runs, means) = parse_summary(&fs::read_to_string(out.join(FILE_NAME)).unwrap()).unwrap();
    assert!(means.is_empty());
    assert_eq!(runs.iter().map(|r| r.method).collect::<Vec<_>>(), vec![Method::Bb, Method::Lmsdc]);
    for entry in &runs {
        assert_eq!(entry.seed, 4);
        let csv = out.join(format!("{}.csv", entry.method));
        let text = fs::read_to_string(&csv).unwrap();
        assert_eq!(text.lines().next(), Some(HEADER));
        let trace = load_trace(&csv, entry).unwrap();
        assert_eq!(trace.records.len(), entry.iterations + 1);
        assert_eq!(trace.count(Event::FIncrease), entry.f_increase_count);
        assert_eq!(trace.count(Event::GIncrease), entry.g_increase_count);
        assert!(entry.converged);
    }
    assert!(!out.join("lmsd.csv").exists());
}

#[test]
fn files_reconstruct_the_runs_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = parse_config("method = sd, bb, lmsd, lmsdc, lmsdr\nsd.max_iter = 250\nlmsdr.k = 3\n").unwrap();
    cfg.out_dir = dir.path().to_path_buf();
    let output = run_experiment(&cfg, Execution::Parallel).unwrap();
    for ((run, entry), path) in output.runs.iter().zip(&output.summaries).zip(&output.trace_files) {
        assert_eq!(load_trace(path, entry).unwrap(), run.trace, "{}", run.method);
    }
    assert!(!output.summaries[0].converged);
}

#[test]
fn sequential_and_parallel_runs_agree() {
    let cfg = parse_config("method = bb, lmsd, lmsdc, lmsdr\nrepeat = 3\n").unwrap();
    assert_eq!(
        execute(&cfg, Execution::Sequential).unwrap(),
        execute(&cfg, Execution::Parallel).unwrap()
    );
}

#[test]
fn repeat_writes_per_seed_files_and_means() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "method = lmsd\n");
    let out = dir.path().join("batch");
    let res = lab(&["run", "--config", &cfg, "--seed", "10", "--repeat", "3", "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    for seed in 10..13 {
        assert!(out.join(format!("lmsd_seed{seed}.csv")).exists());
    }
    let (runs, means) = parse_summary(&fs::read_to_string(out.join(FILE_NAME)).unwrap()).unwrap();
    assert_eq!(runs.len(), 3);
    assert_eq!(means.len(), 1);
    let mean = runs.iter().map(|r| r.iterations as f64).sum::<f64>() / 3.0;
    assert_eq!(means[0].mean_iterations, mean);
}

#[test]
fn minimizer_start_gives_single_record() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = parse_config("x0 = minimizer\nmethod = sd, lmsdc\n").unwrap();
    cfg.out_dir = dir.path().to_path_buf();
    let output = run_experiment(&cfg, Execution::Sequential).unwrap();
    for (run, path) in output.runs.iter().zip(&output.trace_files) {
        assert!(run.trace.converged);
        assert_eq!(run.trace.iterations, 0);
        assert_eq!(fs::read_to_string(path).unwrap().lines().count(), 2);
    }
}

#[test]
fn unwritable_output_fails_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "not a directory").unwrap();
    let mut cfg = parse_config("").unwrap();
    cfg.out_dir = blocker.join("out");
    let err = run_experiment(&cfg, Execution::Parallel).unwrap_err();
    assert!(matches!(err, LabError::Io { .. }), "{err}");

    let cfg_path = write_config(dir.path(), "");
    let res = lab(&["run", "--config", &cfg_path, "--out", blocker.join("out").to_str().unwrap()]);
    assert!(!res.status.success());
    assert!(res.stdout.is_empty());
}

#[test]
fn bad_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "method = \"lmsdx\"\n");
    let res = lab(&["run", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert!(!res.status.success());
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("`method`"), "{stderr}");
    assert!(!dir.path().join("o").exists());
}

#[test]
fn compare_same_method_has_zero_differences() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "seed = 2\n");
    let res = lab(&["compare", "--config", &cfg, "--a", "lmsdr", "--b", "lmsdr", "--checkpoints", "10,50,100,150"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8(res.stdout).unwrap();
    let rows: Vec<&str> = stdout.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    for (row, n) in rows.iter().zip(["10", "50", "100", "150"]) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], n);
        assert_eq!(fields[3].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn compare_defaults_flags_carried_residuals() {
    let cfg = parse_config("").unwrap();
    let report = compare_methods(&cfg, Method::Lmsdc, Method::Bb, None, Execution::Parallel).unwrap();
    assert_eq!(report.rows.iter().map(|r| r.checkpoint).collect::<Vec<_>>(), vec![100, 150, 200]);
    let lmsdc = execute(&parse_config("method = lmsdc").unwrap(), Execution::Sequential).unwrap();
    let done = lmsdc[0].trace.iterations;
    for row in &report.rows {
        assert_eq!(row.carried_a, row.checkpoint > done);
        assert!(row.diff >= 0.0);
    }
}

#[test]
fn compare_past_both_caps_is_range_error() {
    let cfg = parse_config("max_iter = 100").unwrap();
    let err = compare_methods(&cfg, Method::Bb, Method::Lmsd, Some(&[50, 101]), Execution::Parallel).unwrap_err();
    assert!(matches!(err, LabError::Range(_)), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "max_iter = 100\n");
    let res = lab(&["compare", "--config", &path, "--a", "bb", "--b", "lmsd", "--checkpoints", "50,101"]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("out of range"));
}
