//! Summary file: blank-line separated blocks of `key = value` lines. Each
//! run contributes a block with `method, seed, converged, iterations,
//! factorizations, f_increase_count, g_increase_count`; repeated runs add
//! one `mean_*` block per method.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use lmsd_core::sweeps::{Event, Method, RunTrace};

use crate::error::{LabError, Result};

pub const FILE_NAME: &str = "summary.txt";

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub method: Method,
    pub seed: u64,
    pub converged: bool,
    pub iterations: usize,
    pub factorizations: usize,
    pub f_increase_count: usize,
    pub g_increase_count: usize,
}

impl RunSummary {
    pub fn from_trace(method: Method, seed: u64, trace: &RunTrace) -> Self {
        Self {
            method,
            seed,
            converged: trace.converged,
            iterations: trace.iterations,
            factorizations: trace.factorization_count,
            f_increase_count: trace.count(Event::FIncrease),
            g_increase_count: trace.count(Event::GIncrease),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanSummary {
    pub method: Method,
    pub runs: usize,
    pub converged_runs: usize,
    pub mean_iterations: f64,
    pub mean_factorizations: f64,
    pub mean_f_increase_count: f64,
    pub mean_g_increase_count: f64,
}

impl MeanSummary {
    /// Averages over the runs of `method`; `None` when there are none.
    pub fn over(method: Method, runs: &[RunSummary]) -> Option<Self> {
        let own: Vec<&RunSummary> = runs.iter().filter(|r| r.method == method).collect();
        if own.is_empty() {
            return None;
        }
        let n = own.len() as f64;
        let mean = |f: fn(&RunSummary) -> usize| own.iter().map(|r| f(r) as f64).sum::<f64>() / n;
        Some(Self {
            method,
            runs: own.len(),
            converged_runs: own.iter().filter(|r| r.converged).count(),
            mean_iterations: mean(|r| r.iterations),
            mean_factorizations: mean(|r| r.factorizations),
            mean_f_increase_count: mean(|r| r.f_increase_count),
            mean_g_increase_count: mean(|r| r.g_increase_count),
        })
    }
}

pub fn format_summary(runs: &[RunSummary], means: &[MeanSummary]) -> String {
    let mut out = String::new();
    for r in runs {
        let _ = writeln!(out, "method = {}", r.method);
        let _ = writeln!(out, "seed = {}", r.seed);
        let _ = writeln!(out, "converged = {}", r.converged);
        let _ = writeln!(out, "iterations = {}", r.iterations);
        let _ = writeln!(out, "factorizations = {}", r.factorizations);
        let _ = writeln!(out, "f_increase_count = {}", r.f_increase_count);
        let _ = writeln!(out, "g_increase_count = {}", r.g_increase_count);
        out.push('\n');
    }
    for m in means {
        let _ = writeln!(out, "method = {}", m.method);
        let _ = writeln!(out, "runs = {}", m.runs);
        let _ = writeln!(out, "converged_runs = {}", m.converged_runs);
        let _ = writeln!(out, "mean_iterations = {}", m.mean_iterations);
        let _ = writeln!(out, "mean_factorizations = {}", m.mean_factorizations);
        let _ = writeln!(out, "mean_f_increase_count = {}", m.mean_f_increase_count);
        let _ = writeln!(out, "mean_g_increase_count = {}", m.mean_g_increase_count);
        out.push('\n');
    }
    out
}

fn blocks(text: &str) -> Result<Vec<BTreeMap<String, String>>> {
    let mut all = Vec::new();
    let mut current = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            if !current.is_empty() {
                all.push(std::mem::take(&mut current));
            }
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| LabError::parse(idx + 1, line, "expected `key = value`"))?;
        current.insert(k.trim().to_string(), v.trim().to_string());
    }
    if !current.is_empty() {
        all.push(current);
    }
    Ok(all)
}

fn field<T: std::str::FromStr>(block: &BTreeMap<String, String>, key: &str) -> Result<T> {
    block
        .get(key)
        .ok_or_else(|| LabError::parse(0, key, "missing"))?
        .parse()
        .map_err(|_| LabError::parse(0, key, "unparseable"))
}

pub fn parse_summary(text: &str) -> Result<(Vec<RunSummary>, Vec<MeanSummary>)> {
    let mut runs = Vec::new();
    let mut means = Vec::new();
    for b in blocks(text)? {
        if b.contains_key("runs") {
            means.push(MeanSummary {
                method: field(&b, "method")?,
                runs: field(&b, "runs")?,
                converged_runs: field(&b, "converged_runs")?,
                mean_iterations: field(&b, "mean_iterations")?,
                mean_factorizations: field(&b, "mean_factorizations")?,
                mean_f_increase_count: field(&b, "mean_f_increase_count")?,
                mean_g_increase_count: field(&b, "mean_g_increase_count")?,
            });
        } else {
            runs.push(RunSummary {
                method: field(&b, "method")?,
                seed: field(&b, "seed")?,
                converged: field(&b, "converged")?,
                iterations: field(&b, "iterations")?,
                factorizations: field(&b, "factorizations")?,
                f_increase_count: field(&b, "f_increase_count")?,
                g_increase_count: field(&b, "g_increase_count")?,
            });
        }
    }
    Ok((runs, means))
}
