use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::factorize::{
    build_t_explicit, build_t_matrix_free, cholesky_extend, condition_guard, qr_factor,
    ritz_values, GradientWindow, TridiagonalMatrix,
};
use crate::problem::{Iterate, QuadraticProblem};
use crate::steplength::{bb_step, sd_step, yuan_step, YuanInputs};

use super::{
    detect_and_police, monotonicity_events, Decision, Event, Events, Method, Phase, RitzPath,
    RitzStack, RunTrace, SweepConfig, TraceRecord,
};

/// Everything a sweep factorized, handed to observers of [`run_observed`].
#[derive(Debug, Clone)]
pub struct WindowSnapshot {
    pub sweep_id: usize,
    /// The window after the conditioning guard.
    pub window: GradientWindow,
    pub tridiagonal: TridiagonalMatrix,
    /// Largest first.
    pub ritz: Vec<f64>,
}

pub fn run(problem: &QuadraticProblem, x0: &[f64], cfg: &SweepConfig) -> Result<RunTrace> {
    run_observed(problem, x0, cfg, &mut |_| {})
}

/// Like [`run`], calling `observer` after every factorization.
pub fn run_observed(
    problem: &QuadraticProblem,
    x0: &[f64],
    cfg: &SweepConfig,
    observer: &mut dyn FnMut(&WindowSnapshot),
) -> Result<RunTrace> {
    cfg.validate()?;
    let mut state = Driver::start(problem, x0, cfg, observer)?;
    let outcome = match cfg.method {
        Method::Sd => state.sd_loop(),
        Method::Bb => state.bb_loop(),
        Method::Lmsd => state.ritz_sweeps(1),
        Method::Lmsdr => state.ritz_sweeps(cfg.k),
        Method::Lmsdc => state.alignment_cycles(),
    };
    outcome.map_err(|e| Error::Run {
        context: format!(
            "{} at iteration {}",
            cfg.method,
            state.trace.records.len().saturating_sub(1)
        ),
        source: Box::new(e),
    })?;
    Ok(state.finish())
}

fn run_as(
    method: Method,
    problem: &QuadraticProblem,
    x0: &[f64],
    cfg: &SweepConfig,
) -> Result<RunTrace> {
    let cfg = SweepConfig {
        method,
        ..cfg.clone()
    };
    run(problem, x0, &cfg)
}

/// Steepest descent with exact line search.
pub fn run_sd(problem: &QuadraticProblem, x0: &[f64], cfg: &SweepConfig) -> Result<RunTrace> {
    run_as(Method::Sd, problem, x0, cfg)
}

/// Barzilai–Borwein; the first step is an SD step.
pub fn run_bb(problem: &QuadraticProblem, x0: &[f64], cfg: &SweepConfig) -> Result<RunTrace> {
    run_as(Method::Bb, problem, x0, cfg)
}

pub fn run_lmsd(problem: &QuadraticProblem, x0: &[f64], cfg: &SweepConfig) -> Result<RunTrace> {
    run_as(Method::Lmsd, problem, x0, cfg)
}

pub fn run_lmsdc(problem: &QuadraticProblem, x0: &[f64], cfg: &SweepConfig) -> Result<RunTrace> {
    run_as(Method::Lmsdc, problem, x0, cfg)
}

pub fn run_lmsdr(problem: &QuadraticProblem, x0: &[f64], cfg: &SweepConfig) -> Result<RunTrace> {
    run_as(Method::Lmsdr, problem, x0, cfg)
}

struct Driver<'a> {
    problem: &'a QuadraticProblem,
    cfg: &'a SweepConfig,
    observer: &'a mut dyn FnMut(&WindowSnapshot),
    current: Iterate,
    /// Previous accepted iterate (BB needs `s` and `y`).
    previous: Option<Iterate>,
    /// Accepted back gradients with the steplength that left each one, oldest first.
    history: VecDeque<(Vec<f64>, f64)>,
    trace: RunTrace,
    gnorm0: f64,
    /// Events waiting for the next record.
    pending: Events,
}

impl<'a> Driver<'a> {
    fn start(
        problem: &'a QuadraticProblem,
        x0: &[f64],
        cfg: &'a SweepConfig,
        observer: &'a mut dyn FnMut(&WindowSnapshot),
    ) -> Result<Self> {
        let current = Iterate::at(problem, x0.to_vec(), 0)?;
        let mut trace = RunTrace::default();
        trace.records.push(TraceRecord {
            iter: 0,
            f: current.fval,
            gnorm: current.gnorm,
            alpha: 0.0,
            phase: Phase::Init,
            sweep_id: 0,
            events: Events::empty(),
        });
        let gnorm0 = current.gnorm;
        let mut driver = Self {
            problem,
            cfg,
            observer,
            current,
            previous: None,
            history: VecDeque::with_capacity(cfg.m + 1),
            trace,
            gnorm0,
            pending: Events::empty(),
        };
        driver.trace.converged = driver.is_converged();
        Ok(driver)
    }

    fn finish(mut self) -> RunTrace {
        self.trace.iterations = self.trace.records.len() - 1;
        self.trace
    }

    fn is_converged(&self) -> bool {
        self.current.gnorm < self.cfg.tol * self.gnorm0
            || self.current.gnorm <= self.problem.gradient_noise_floor(&self.current.x)
    }

    fn done(&self) -> bool {
        self.trace.converged || self.trace.records.len() > self.cfg.max_iter
    }

    /// Evaluates `x − α g`, records it and moves there unless rolled back.
    fn step(&mut self, alpha: f64, phase: Phase, sweep_id: usize, policed: bool) -> Result<Decision> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!("steplength {alpha} is not positive")));
        }
        let index = self.trace.records.len();
        let candidate = self.current.step(self.problem, alpha, index)?;
        let (decision, events) = if policed && self.cfg.detector_enabled {
            detect_and_police(&self.current, &candidate)
        } else {
            (Decision::Accept, monotonicity_events(&self.current, &candidate))
        };
        let events = events.union(std::mem::take(&mut self.pending));
        self.trace.records.push(TraceRecord {
            iter: index,
            f: candidate.fval,
            gnorm: candidate.gnorm,
            alpha,
            phase,
            sweep_id,
            events,
        });
        if decision != Decision::RollbackAndTerminate {
            self.history.push_back((self.current.g.clone(), alpha));
            while self.history.len() > self.cfg.m {
                self.history.pop_front();
            }
            self.previous = Some(std::mem::replace(&mut self.current, candidate));
            self.trace.converged = self.is_converged();
        }
        Ok(decision)
    }

    fn sd_step(&mut self, sweep_id: usize) -> Result<Decision> {
        let alpha = sd_step(self.problem, &self.current.g)?;
        self.step(alpha, Phase::Sd, sweep_id, false)
    }

    fn sd_loop(&mut self) -> Result<()> {
        while !self.done() {
            self.sd_step(0)?;
        }
        Ok(())
    }

    fn bb_loop(&mut self) -> Result<()> {
        if self.done() {
            return Ok(());
        }
        self.sd_step(0)?;
        while !self.done() {
            let prev = self.previous.as_ref().expect("an accepted step precedes BB");
            let s: Vec<f64> = self.current.x.iter().zip(&prev.x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = self.current.g.iter().zip(&prev.g).map(|(a, b)| a - b).collect();
            let alpha = bb_step(&s, &y)?;
            self.step(alpha, Phase::Bb, 0, false)?;
        }
        Ok(())
    }

    /// LMSD (`uses == 1`) and LMSDR (`uses == k`). The first step is an SD
    /// step; sweep `j` factorizes the `min(j, m)` newest back gradients.
    fn ritz_sweeps(&mut self, uses: usize) -> Result<()> {
        if self.done() {
            return Ok(());
        }
        self.sd_step(0)?;
        let mut sweep_id = 0;
        let mut force_sd = false;
        while !self.done() {
            if force_sd {
                // The last sweep was rolled back before moving; an exact
                // line search step guarantees progress.
                self.sd_step(sweep_id)?;
                force_sd = false;
                continue;
            }
            sweep_id += 1;
            let width = sweep_id.min(self.history.len());
            let ritz = self.factorize(width, sweep_id)?;
            let mut stack = RitzStack::new(&ritz, uses);
            if stack.is_empty() {
                force_sd = true;
                continue;
            }
            let mut moved = false;
            while let Some(theta) = stack.peek() {
                if self.done() {
                    break;
                }
                match self.step(1.0 / theta, Phase::Ritz, sweep_id, true)? {
                    Decision::Accept => {
                        stack.consume();
                        moved = true;
                    }
                    Decision::AcceptAndTerminate => {
                        stack.clear();
                        moved = true;
                    }
                    Decision::RollbackAndTerminate => {
                        stack.clear();
                        force_sd = !moved;
                    }
                }
            }
        }
        Ok(())
    }

    /// LMSDC: repeat [m SD steps, Yuan step, d constant steps, m Ritz steps].
    fn alignment_cycles(&mut self) -> Result<()> {
        let m = self.cfg.m;
        let mut cycle = 0;
        while !self.done() {
            cycle += 1;

            let mut last_sd = None;
            for _ in 0..m {
                if self.done() {
                    return Ok(());
                }
                let gnorm = self.current.gnorm;
                let alpha = sd_step(self.problem, &self.current.g)?;
                self.step(alpha, Phase::Sd, cycle, false)?;
                last_sd = Some((alpha, gnorm));
            }
            if self.done() {
                return Ok(());
            }

            let (alpha_sd_prev, gnorm_prev) = last_sd.expect("m >= 1");
            let yuan = yuan_step(&YuanInputs {
                alpha_sd_prev,
                alpha_sd_curr: sd_step(self.problem, &self.current.g)?,
                gnorm_prev,
                gnorm_curr: self.current.gnorm,
            })?;
            if yuan.clamped {
                self.pending.insert(Event::DiscriminantClamped);
            }
            for _ in 0..self.cfg.d {
                if self.done() {
                    return Ok(());
                }
                if self.step(yuan.alpha, Phase::YuanConst, cycle, true)? != Decision::Accept {
                    break;
                }
            }
            if self.done() {
                return Ok(());
            }

            let width = m.min(self.history.len());
            let ritz = self.factorize(width, cycle)?;
            let mut stack = RitzStack::new(&ritz, 1);
            while let Some(theta) = stack.peek() {
                if self.done() {
                    return Ok(());
                }
                match self.step(1.0 / theta, Phase::Ritz, cycle, true)? {
                    Decision::Accept => stack.consume(),
                    _ => stack.clear(),
                }
            }
        }
        Ok(())
    }

    /// Factorizes the `width` newest back gradients and returns their Ritz
    /// values, largest first.
    fn factorize(&mut self, width: usize, sweep_id: usize) -> Result<Vec<f64>> {
        let start = self.history.len() - width;
        let (columns, steps): (Vec<Vec<f64>>, Vec<f64>) =
            self.history.iter().skip(start).cloned().unzip();
        let window =
            GradientWindow::with_steplengths(columns, self.current.g.clone(), steps)?;
        let mut guarded = condition_guard(&window, self.cfg.rank_tol);

        let tridiagonal = match self.cfg.ritz_path {
            RitzPath::Explicit => {
                let qr = qr_factor(guarded.columns(), self.cfg.rank_tol)?;
                build_t_explicit(&qr.q, self.problem)?
            }
            RitzPath::MatrixFree => loop {
                match cholesky_extend(&guarded) {
                    Ok(rf) => break build_t_matrix_free(&rf, guarded.steplengths())?,
                    Err(Error::IllConditioned { .. }) if guarded.len() > 1 => {
                        guarded = guarded.newest(guarded.len() - 1);
                    }
                    Err(e) => return Err(e),
                }
            },
        };
        if guarded.len() < width {
            self.pending.insert(Event::WindowShrunk);
        }
        let ritz = ritz_values(&tridiagonal)?.into_vec();
        self.trace.factorization_count += 1;
        (self.observer)(&WindowSnapshot {
            sweep_id,
            window: guarded,
            tridiagonal,
            ritz: ritz.clone(),
        });
        Ok(ritz)
    }
}
