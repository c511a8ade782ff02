use std::fmt::{self, Write as _};

use lmsd_core::batch::Execution;
use lmsd_core::sweeps::{Method, RunTrace};

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::experiment::execute;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointRow {
    pub checkpoint: usize,
    pub p1: f64,
    pub p2: f64,
    pub diff: f64,
    /// The run ended before the checkpoint; `p1`/`p2` is its final residual.
    pub carried_a: bool,
    pub carried_b: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub a: Method,
    pub b: Method,
    pub rows: Vec<CheckpointRow>,
}

fn residual_at(trace: &RunTrace, n: usize) -> (f64, bool) {
    match trace.gnorm_at(n) {
        Some(g) => (g, false),
        None => (trace.final_gnorm().unwrap_or(f64::NAN), true),
    }
}

/// Tabulates gradient norms of two runs at `checkpoints`. A checkpoint past
/// the iteration cap of both runs is a range error.
pub fn compare_traces(
    (a, trace_a, max_a): (Method, &RunTrace, usize),
    (b, trace_b, max_b): (Method, &RunTrace, usize),
    checkpoints: &[usize],
) -> Result<ComparisonReport> {
    let limit = max_a.max(max_b);
    let mut rows = Vec::with_capacity(checkpoints.len());
    for &n in checkpoints {
        if n > limit {
            return Err(LabError::Range(format!(
                "checkpoint {n} exceeds the iteration cap of both runs ({limit})"
            )));
        }
        let (p1, carried_a) = residual_at(trace_a, n);
        let (p2, carried_b) = residual_at(trace_b, n);
        rows.push(CheckpointRow {
            checkpoint: n,
            p1,
            p2,
            diff: (p1 - p2).abs(),
            carried_a,
            carried_b,
        });
    }
    Ok(ComparisonReport { a, b, rows })
}

/// Runs methods `a` and `b` on the configured problem and compares them at
/// `checkpoints` (the config's list when `None`).
pub fn compare_methods(
    cfg: &ExperimentConfig,
    a: Method,
    b: Method,
    checkpoints: Option<&[usize]>,
    exec: Execution,
) -> Result<ComparisonReport> {
    let checkpoints = checkpoints.unwrap_or(&cfg.checkpoints);
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::parse(0, "checkpoints", "must be strictly increasing"));
    }
    let (ca, cb) = (cfg.config_for(a), cfg.config_for(b));
    let limit = ca.max_iter.max(cb.max_iter);
    if let Some(&n) = checkpoints.iter().find(|&&n| n > limit) {
        return Err(LabError::Range(format!(
            "checkpoint {n} exceeds the iteration cap of both runs ({limit})"
        )));
    }
    let mut pair = cfg.clone();
    pair.repeat = 1;
    pair.methods = vec![ca.clone(), cb.clone()];
    let runs = execute(&pair, exec)?;
    compare_traces(
        (a, &runs[0].trace, ca.max_iter),
        (b, &runs[1].trace, cb.max_iter),
        checkpoints,
    )
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(out, "checkpoint,{},{},abs_diff,carried_{},carried_{}", self.a, self.b, self.a, self.b);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{},{}",
                r.checkpoint, r.p1, r.p2, r.diff, r.carried_a, r.carried_b
            );
        }
        f.write_str(&out)
    }
}
