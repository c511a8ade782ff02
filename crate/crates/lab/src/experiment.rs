use std::fs;
use std::path::{Path, PathBuf};

use lmsd_core::batch::{map_indexed, Execution};
use lmsd_core::sweeps::{run, Method, RunTrace};

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::io::{ensure_writable_dir, write_atomic};
use crate::summary::{self, format_summary, MeanSummary, RunSummary};
use crate::trace_csv::{format_trace, parse_trace};

#[derive(Debug, Clone, PartialEq)]
pub struct MethodRun {
    pub method: Method,
    pub seed: u64,
    pub trace: RunTrace,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub runs: Vec<MethodRun>,
    pub summaries: Vec<RunSummary>,
    pub means: Vec<MeanSummary>,
    pub trace_files: Vec<PathBuf>,
    pub summary_file: PathBuf,
}

pub fn trace_file_name(method: Method, seed: u64, repeat: usize) -> String {
    if repeat > 1 {
        format!("{method}_seed{seed}.csv")
    } else {
        format!("{method}.csv")
    }
}

/// Runs every (seed, method) pair of `cfg` without touching the disk.
pub fn execute(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<MethodRun>> {
    let seeds: Vec<u64> = (0..cfg.repeat as u64).map(|i| cfg.problem.seed + i).collect();
    let problems = seeds
        .iter()
        .map(|&s| cfg.problem.build_with_seed(s))
        .collect::<lmsd_core::Result<Vec<_>>>()?;
    let width = cfg.methods.len();
    let results = map_indexed(seeds.len() * width, exec, |i| {
        let (s, j) = (i / width, i % width);
        let problem = &problems[s];
        let sweep = &cfg.methods[j];
        let x0 = cfg.x0.resolve(problem);
        run(problem, &x0, sweep)
            .map(|trace| MethodRun {
                method: sweep.method,
                seed: seeds[s],
                trace,
            })
            .map_err(|e| lmsd_core::Error::Run {
                context: format!("{} with seed {}", sweep.method, seeds[s]),
                source: Box::new(e),
            })
    });
    results
        .into_iter()
        .map(|r| r.map_err(LabError::from))
        .collect()
}

/// Runs the experiment and writes one trace CSV per run plus the summary
/// file into `cfg.out_dir`. The output directory is checked before any run.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentOutput> {
    ensure_writable_dir(&cfg.out_dir)?;
    let runs = execute(cfg, exec)?;

    let mut trace_files = Vec::with_capacity(runs.len());
    for r in &runs {
        let path = cfg.out_dir.join(trace_file_name(r.method, r.seed, cfg.repeat));
        write_atomic(&path, &format_trace(&r.trace.records))?;
        trace_files.push(path);
    }

    let summaries: Vec<RunSummary> = runs
        .iter()
        .map(|r| RunSummary::from_trace(r.method, r.seed, &r.trace))
        .collect();
    let means: Vec<MeanSummary> = if cfg.repeat > 1 {
        cfg.methods
            .iter()
            .filter_map(|c| MeanSummary::over(c.method, &summaries))
            .collect()
    } else {
        Vec::new()
    };
    let summary_file = cfg.out_dir.join(summary::FILE_NAME);
    write_atomic(&summary_file, &format_summary(&summaries, &means))?;

    Ok(ExperimentOutput {
        runs,
        summaries,
        means,
        trace_files,
        summary_file,
    })
}

/// Rebuilds a trace from its CSV and summary entry.
pub fn load_trace(csv_path: &Path, entry: &RunSummary) -> Result<RunTrace> {
    let text = fs::read_to_string(csv_path).map_err(|e| LabError::io(csv_path, e))?;
    Ok(RunTrace {
        records: parse_trace(&text)?,
        converged: entry.converged,
        iterations: entry.iterations,
        factorization_count: entry.factorizations,
    })
}
