//! Independent runs evaluated together. With the `parallel` feature the
//! work is spread over the rayon pool; without it, or with
//! [`Execution::Sequential`], jobs run in order on the calling thread.
//! Results come back in job order either way.

use crate::error::Result;
use crate::problem::QuadraticProblem;
use crate::sweeps::{run, RunTrace, SweepConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether `Parallel` actually uses threads in this build.
    pub const PARALLEL_AVAILABLE: bool = cfg!(feature = "parallel");
}

#[derive(Debug, Clone)]
pub struct Job {
    pub problem: QuadraticProblem,
    pub x0: Vec<f64>,
    pub config: SweepConfig,
}

/// Evaluates `f(0), …, f(count − 1)`.
pub fn map_indexed<T, F>(count: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(f).collect()
        }
        _ => (0..count).map(f).collect(),
    }
}

pub fn run_jobs(jobs: &[Job], exec: Execution) -> Vec<Result<RunTrace>> {
    map_indexed(jobs.len(), exec, |i| {
        let job = &jobs[i];
        run(&job.problem, &job.x0, &job.config)
    })
}
