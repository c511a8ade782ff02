use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// What produced the steplength of a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Init,
    Sd,
    Bb,
    YuanConst,
    Ritz,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Init => "init",
            Phase::Sd => "sd",
            Phase::Bb => "bb",
            Phase::YuanConst => "yuan-const",
            Phase::Ritz => "ritz",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "init" => Phase::Init,
            "sd" => Phase::Sd,
            "bb" => Phase::Bb,
            "yuan-const" => Phase::YuanConst,
            "ritz" => Phase::Ritz,
            other => return Err(Error::Config(format!("unknown phase {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    FIncrease,
    GIncrease,
    SweepTerminated,
    Rollback,
    DiscriminantClamped,
    WindowShrunk,
}

impl Event {
    pub const ALL: [Event; 6] = [
        Event::FIncrease,
        Event::GIncrease,
        Event::SweepTerminated,
        Event::Rollback,
        Event::DiscriminantClamped,
        Event::WindowShrunk,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Event::FIncrease => "f-increase",
            Event::GIncrease => "g-increase",
            Event::SweepTerminated => "sweep-terminated",
            Event::Rollback => "rollback",
            Event::DiscriminantClamped => "discriminant-clamped",
            Event::WindowShrunk => "window-shrunk",
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl FromStr for Event {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Event::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown event {s:?}")))
    }
}

/// Set of [`Event`]s; iterates and prints in declaration order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Events(u8);

impl Events {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn insert(&mut self, e: Event) {
        self.0 |= e.bit();
    }

    pub fn with(mut self, e: Event) -> Self {
        self.insert(e);
        self
    }

    pub fn union(self, other: Events) -> Self {
        Self(self.0 | other.0)
    }

    pub fn contains(self, e: Event) -> bool {
        self.0 & e.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Event> {
        Event::ALL.into_iter().filter(move |e| self.contains(*e))
    }
}

impl FromIterator<Event> for Events {
    fn from_iter<I: IntoIterator<Item = Event>>(iter: I) -> Self {
        let mut set = Events::empty();
        for e in iter {
            set.insert(e);
        }
        set
    }
}

/// `|`-separated tokens, empty for the empty set.
impl fmt::Display for Events {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<&str> = self.iter().map(Event::as_str).collect();
        f.write_str(&tokens.join("|"))
    }
}

impl FromStr for Events {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s.is_empty() {
            return Ok(Events::empty());
        }
        s.split('|').map(str::parse).collect()
    }
}

/// One step of a run. A record flagged [`Event::Rollback`] describes a
/// rejected candidate: the iterate did not move.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub f: f64,
    pub gnorm: f64,
    pub alpha: f64,
    pub phase: Phase,
    pub sweep_id: usize,
    pub events: Events,
}

impl TraceRecord {
    pub fn accepted(&self) -> bool {
        !self.events.contains(Event::Rollback)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    pub converged: bool,
    pub iterations: usize,
    pub factorization_count: usize,
}

impl RunTrace {
    pub fn initial_gnorm(&self) -> Option<f64> {
        self.records.first().map(|r| r.gnorm)
    }

    /// Gradient norm of the last accepted iterate.
    pub fn final_gnorm(&self) -> Option<f64> {
        self.accepted().last().map(|r| r.gnorm)
    }

    pub fn accepted(&self) -> impl Iterator<Item = &TraceRecord> {
        self.records.iter().filter(|r| r.accepted())
    }

    pub fn count(&self, event: Event) -> usize {
        self.records.iter().filter(|r| r.events.contains(event)).count()
    }

    /// Steplengths of every step after the initial record, rejected ones included.
    pub fn steplengths(&self) -> Vec<f64> {
        self.records.iter().skip(1).map(|r| r.alpha).collect()
    }

    /// Gradient norm of the current (last accepted) iterate after `n` steps;
    /// `None` past the end of the run.
    pub fn gnorm_at(&self, n: usize) -> Option<f64> {
        if n >= self.records.len() {
            return None;
        }
        self.records[..=n].iter().rev().find(|r| r.accepted()).map(|r| r.gnorm)
    }
}
