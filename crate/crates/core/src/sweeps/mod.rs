//! Sweep-based gradient methods as state machines over a quadratic problem.
//!
//! * `SD`: exact line search every step.
//! * `BB`: Barzilai–Borwein after one SD step.
//! * `LMSD`: limited memory steepest descent. Each sweep factorizes the back
//!   gradients, extracts Ritz values and applies their reciprocals, largest
//!   Ritz value first.
//! * `LMSDC`: cycles of `m` SD steps, `d` steps with a constant Yuan
//!   steplength, then `m` Ritz steps from the most recent gradients.
//! * `LMSDR`: LMSD with every Ritz value reused `k` times in a row.

mod driver;
mod trace;

pub use driver::{run, run_bb, run_lmsd, run_lmsdc, run_lmsdr, run_observed, run_sd, WindowSnapshot};
pub use trace::{Event, Events, Phase, RunTrace, TraceRecord};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::factorize::DEFAULT_RANK_TOL;
use crate::problem::Iterate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Sd,
    Bb,
    Lmsd,
    Lmsdc,
    Lmsdr,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Sd,
        Method::Bb,
        Method::Lmsd,
        Method::Lmsdc,
        Method::Lmsdr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Sd => "sd",
            Method::Bb => "bb",
            Method::Lmsd => "lmsd",
            Method::Lmsdc => "lmsdc",
            Method::Lmsdr => "lmsdr",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == lower)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

/// How the tridiagonal projection is formed inside a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RitzPath {
    /// Householder QR of the window, then `QᵀAQ`.
    #[default]
    Explicit,
    /// Gram-matrix Cholesky and `[R, r]·J·R⁻¹`; never touches the Hessian.
    MatrixFree,
}

impl RitzPath {
    pub fn as_str(self) -> &'static str {
        match self {
            RitzPath::Explicit => "explicit",
            RitzPath::MatrixFree => "matrix-free",
        }
    }
}

impl FromStr for RitzPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "explicit" => Ok(RitzPath::Explicit),
            "matrix-free" => Ok(RitzPath::MatrixFree),
            other => Err(Error::Config(format!("unknown ritz path {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub method: Method,
    /// Number of back gradients (and Ritz values) per sweep.
    pub m: usize,
    /// Constant-steplength phase length (LMSDC).
    pub d: usize,
    /// Uses of each Ritz value (LMSDR).
    pub k: usize,
    /// Stop once `‖g_n‖ < tol·‖g_0‖`.
    pub tol: f64,
    pub max_iter: usize,
    pub rank_tol: f64,
    pub detector_enabled: bool,
    pub ritz_path: RitzPath,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            method: Method::Lmsd,
            m: 4,
            d: 4,
            k: 2,
            tol: 1e-6,
            max_iter: 1000,
            rank_tol: DEFAULT_RANK_TOL,
            detector_enabled: true,
            ritz_path: RitzPath::Explicit,
        }
    }
}

impl SweepConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Config("m must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!("tol = {} must lie in (0, 1)", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        if !(self.rank_tol > 0.0) || !self.rank_tol.is_finite() {
            return Err(Error::Config(format!("rank_tol = {} must be positive", self.rank_tol)));
        }
        Ok(())
    }
}

/// Outcome of the monotonicity check on a candidate iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accept,
    /// Keep the iterate but drop the rest of the sweep.
    AcceptAndTerminate,
    /// Discard the iterate and drop the rest of the sweep.
    RollbackAndTerminate,
}

/// Flags `f-increase` / `g-increase` for a candidate relative to the
/// current iterate.
pub fn monotonicity_events(current: &Iterate, candidate: &Iterate) -> Events {
    let mut events = Events::empty();
    if candidate.fval > current.fval {
        events.insert(Event::FIncrease);
    }
    if candidate.gnorm > current.gnorm {
        events.insert(Event::GIncrease);
    }
    events
}

/// Sweep termination policy: an increase in `f` rolls the step back, an
/// increase in `‖g‖` alone keeps it; either one ends the sweep.
pub fn detect_and_police(current: &Iterate, candidate: &Iterate) -> (Decision, Events) {
    let mut events = monotonicity_events(current, candidate);
    let decision = if events.contains(Event::FIncrease) {
        events.insert(Event::SweepTerminated);
        events.insert(Event::Rollback);
        Decision::RollbackAndTerminate
    } else if events.contains(Event::GIncrease) {
        events.insert(Event::SweepTerminated);
        Decision::AcceptAndTerminate
    } else {
        Decision::Accept
    };
    (decision, events)
}

/// Ritz values waiting to be applied, largest first, each with a number of
/// remaining uses.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RitzStack {
    pending: Vec<(f64, usize)>,
}

impl RitzStack {
    /// Keeps the positive values, sorted decreasing, each usable `uses` times.
    pub fn new(values: &[f64], uses: usize) -> Self {
        let mut kept: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0).collect();
        kept.sort_by(|a, b| b.total_cmp(a));
        Self {
            pending: kept.into_iter().map(|v| (v, uses.max(1))).collect(),
        }
    }

    pub fn peek(&self) -> Option<f64> {
        self.pending.first().map(|(v, _)| *v)
    }

    /// Spends one use of the front value.
    pub fn consume(&mut self) {
        if let Some(front) = self.pending.first_mut() {
            front.1 -= 1;
            if front.1 == 0 {
                self.pending.remove(0);
            }
        }
    }

    pub fn clear(&mut self) {
        self.pending.clear();
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    /// Total uses left.
    pub fn remaining(&self) -> usize {
        self.pending.iter().map(|(_, c)| c).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iterate(fval: f64, gnorm: f64) -> Iterate {
        Iterate {
            x: vec![],
            g: vec![],
            fval,
            gnorm,
            index: 0,
        }
    }

    #[test]
    fn detector_decisions() {
        let cur = iterate(-1.0, 2.0);
        let (d, e) = detect_and_police(&cur, &iterate(-2.0, 1.0));
        assert_eq!(d, Decision::Accept);
        assert!(e.is_empty());

        let (d, e) = detect_and_police(&cur, &iterate(0.0, 1.0));
        assert_eq!(d, Decision::RollbackAndTerminate);
        assert_eq!(
            e,
            Events::empty()
                .with(Event::FIncrease)
                .with(Event::SweepTerminated)
                .with(Event::Rollback)
        );

        let (d, e) = detect_and_police(&cur, &iterate(-2.0, 3.0));
        assert_eq!(d, Decision::AcceptAndTerminate);
        assert_eq!(e, Events::empty().with(Event::GIncrease).with(Event::SweepTerminated));
    }

    #[test]
    fn ritz_stack_order_and_reuse() {
        let mut s = RitzStack::new(&[1.0, 3.0, -0.5, 2.0], 2);
        assert_eq!(s.remaining(), 6);
        let mut seen = vec![];
        while let Some(v) = s.peek() {
            seen.push(v);
            s.consume();
        }
        assert_eq!(seen, vec![3.0, 3.0, 2.0, 2.0, 1.0, 1.0]);
        let mut s = RitzStack::new(&[1.0, 2.0], 1);
        s.clear();
        assert!(s.is_empty() && s.peek().is_none());
    }

    #[test]
    fn config_validation() {
        assert!(SweepConfig::default().validate().is_ok());
        for bad in [
            SweepConfig { m: 0, ..Default::default() },
            SweepConfig { k: 0, ..Default::default() },
            SweepConfig { tol: 1.0, ..Default::default() },
            SweepConfig { tol: 0.0, ..Default::default() },
            SweepConfig { max_iter: 0, ..Default::default() },
            SweepConfig { rank_tol: 0.0, ..Default::default() },
        ] {
            assert!(matches!(bad.validate(), Err(Error::Config(_))), "{bad:?}");
        }
    }

    #[test]
    fn method_names() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert_eq!("LMSDR".parse::<Method>().unwrap(), Method::Lmsdr);
        assert!("lmsdx".parse::<Method>().is_err());
    }
}
