//! Flat `key = value` experiment documents.
//!
//! ```text
//! # problem
//! dim = 20
//! seed = 7
//! method = lmsd, lmsdc, lmsdr
//! m = 4
//! lmsdr.k = 3        # per-method override
//! ```
//!
//! Missing keys take the defaults of the geometric-spectrum experiment:
//! `dim 20`, `lambda1 1`, `ratio √2`, `b` in `[10, 20]`, `tol 1e-6`, `m 4`,
//! `d 4`, `k 2`, `x0 = zero`.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use lmsd_core::sweeps::{Method, RitzPath, SweepConfig};
use lmsd_core::{make_fletcher_problem, QuadraticProblem};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub dim: usize,
    pub lambda1: f64,
    pub ratio: f64,
    pub b_low: f64,
    pub b_high: f64,
    pub seed: u64,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        Self {
            dim: 20,
            lambda1: 1.0,
            ratio: std::f64::consts::SQRT_2,
            b_low: 10.0,
            b_high: 20.0,
            seed: 0,
        }
    }
}

impl ProblemSpec {
    pub fn build(&self) -> lmsd_core::Result<QuadraticProblem> {
        self.build_with_seed(self.seed)
    }

    pub fn build_with_seed(&self, seed: u64) -> lmsd_core::Result<QuadraticProblem> {
        make_fletcher_problem(self.dim, self.lambda1, self.ratio, self.b_low, self.b_high, seed)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum StartPoint {
    #[default]
    Zero,
    Minimizer,
    Explicit(Vec<f64>),
}

impl StartPoint {
    pub fn resolve(&self, problem: &QuadraticProblem) -> Vec<f64> {
        match self {
            StartPoint::Zero => vec![0.0; problem.dim()],
            StartPoint::Minimizer => problem.minimizer(),
            StartPoint::Explicit(x) => x.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    /// Settings shared by every method unless overridden.
    pub defaults: SweepConfig,
    /// One fully resolved configuration per method, in run order.
    pub methods: Vec<SweepConfig>,
    pub x0: StartPoint,
    pub out_dir: PathBuf,
    pub checkpoints: Vec<usize>,
    /// Number of right-hand sides; run `i` uses seed `seed + i`.
    pub repeat: usize,
}

pub const DEFAULT_METHODS: [Method; 3] = [Method::Lmsd, Method::Lmsdc, Method::Lmsdr];
pub const DEFAULT_CHECKPOINTS: [usize; 3] = [100, 150, 200];

impl Default for ExperimentConfig {
    fn default() -> Self {
        let defaults = SweepConfig::default();
        Self {
            problem: ProblemSpec::default(),
            methods: DEFAULT_METHODS
                .iter()
                .map(|&method| SweepConfig {
                    method,
                    ..defaults.clone()
                })
                .collect(),
            defaults,
            x0: StartPoint::Zero,
            out_dir: PathBuf::from("out"),
            checkpoints: DEFAULT_CHECKPOINTS.to_vec(),
            repeat: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn method(&self, method: Method) -> Option<&SweepConfig> {
        self.methods.iter().find(|c| c.method == method)
    }

    /// Config for `method`: its own entry if listed, the shared defaults otherwise.
    pub fn config_for(&self, method: Method) -> SweepConfig {
        self.method(method).cloned().unwrap_or_else(|| SweepConfig {
            method,
            ..self.defaults.clone()
        })
    }

    /// Replaces the method list, keeping existing per-method settings.
    pub fn select_methods(&mut self, methods: &[Method]) {
        self.methods = methods.iter().map(|&m| self.config_for(m)).collect();
    }
}

const SWEEP_KEYS: [&str; 8] = ["m", "d", "k", "tol", "max_iter", "rank_tol", "detector", "ritz_path"];

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| LabError::parse(line, key, format!("{value:?}: {e}")))
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        other => Err(LabError::parse(line, key, format!("{other:?} is not a boolean"))),
    }
}

fn parse_list<T: FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(line, key, s))
        .collect()
}

fn apply_sweep_key(cfg: &mut SweepConfig, line: usize, key: &str, field: &str, value: &str) -> Result<()> {
    match field {
        "m" => cfg.m = parse_value(line, key, value)?,
        "d" => cfg.d = parse_value(line, key, value)?,
        "k" => cfg.k = parse_value(line, key, value)?,
        "tol" => cfg.tol = parse_value(line, key, value)?,
        "max_iter" => cfg.max_iter = parse_value(line, key, value)?,
        "rank_tol" => cfg.rank_tol = parse_value(line, key, value)?,
        "detector" => cfg.detector_enabled = parse_bool(line, key, value)?,
        "ritz_path" => {
            cfg.ritz_path = value
                .parse::<RitzPath>()
                .map_err(|e| LabError::parse(line, key, e.to_string()))?
        }
        _ => return Err(LabError::parse(line, key, "unknown key")),
    }
    let field_error = match field {
        "m" if cfg.m == 0 => Some("must be at least 1"),
        "k" if cfg.k == 0 => Some("must be at least 1"),
        "tol" if !(cfg.tol > 0.0 && cfg.tol < 1.0) => Some("must lie in (0, 1)"),
        "max_iter" if cfg.max_iter == 0 => Some("must be at least 1"),
        "rank_tol" if !(cfg.rank_tol > 0.0) || !cfg.rank_tol.is_finite() => Some("must be positive"),
        _ => None,
    };
    match field_error {
        Some(msg) => Err(LabError::parse(line, key, msg)),
        None => Ok(()),
    }
}

/// Parses a configuration document. Unknown keys are rejected; errors name
/// the offending key.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut methods: Option<Vec<Method>> = None;
    let mut overrides: Vec<(usize, Method, String, String)> = Vec::new();
    let mut method_line = 0;
    let mut checkpoint_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(LabError::parse(line, content, "expected `key = value`"));
        };
        let key = key.trim();
        let value = value.trim().trim_matches('"').trim();

        if let Some((prefix, field)) = key.split_once('.') {
            let method = prefix
                .parse::<Method>()
                .map_err(|_| LabError::parse(line, key, format!("unknown method {prefix:?}")))?;
            if !SWEEP_KEYS.contains(&field) {
                return Err(LabError::parse(line, key, "unknown key"));
            }
            overrides.push((line, method, field.to_string(), value.to_string()));
            continue;
        }

        match key {
            "dim" => {
                cfg.problem.dim = parse_value(line, key, value)?;
                if cfg.problem.dim == 0 {
                    return Err(LabError::parse(line, key, "must be at least 1"));
                }
            }
            "lambda1" => {
                cfg.problem.lambda1 = parse_value(line, key, value)?;
                if !(cfg.problem.lambda1 > 0.0) {
                    return Err(LabError::parse(line, key, "must be positive"));
                }
            }
            "ratio" => {
                cfg.problem.ratio = parse_value(line, key, value)?;
                if !(cfg.problem.ratio >= 1.0) {
                    return Err(LabError::parse(line, key, "must be at least 1"));
                }
            }
            "b_low" => cfg.problem.b_low = parse_value(line, key, value)?,
            "b_high" => cfg.problem.b_high = parse_value(line, key, value)?,
            "seed" => cfg.problem.seed = parse_value(line, key, value)?,
            "method" | "methods" => {
                let list: Vec<Method> = parse_list(line, "method", value)?;
                if list.is_empty() {
                    return Err(LabError::parse(line, "method", "at least one method is required"));
                }
                methods = Some(list);
                method_line = line;
            }
            "x0" => {
                cfg.x0 = match value {
                    "zero" => StartPoint::Zero,
                    "minimizer" => StartPoint::Minimizer,
                    list => StartPoint::Explicit(parse_list(line, key, list)?),
                }
            }
            "out" => cfg.out_dir = PathBuf::from(value),
            "checkpoints" => {
                cfg.checkpoints = parse_list(line, key, value)?;
                checkpoint_line = line;
            }
            "repeat" => {
                cfg.repeat = parse_value(line, key, value)?;
                if cfg.repeat == 0 {
                    return Err(LabError::parse(line, key, "must be at least 1"));
                }
            }
            field if SWEEP_KEYS.contains(&field) => {
                apply_sweep_key(&mut cfg.defaults, line, key, field, value)?;
            }
            _ => return Err(LabError::parse(line, key, "unknown key")),
        }
    }

    if !(cfg.problem.b_low <= cfg.problem.b_high) {
        return Err(LabError::parse(0, "b_low", "must not exceed b_high"));
    }
    if cfg.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::parse(checkpoint_line, "checkpoints", "must be strictly increasing"));
    }
    if let StartPoint::Explicit(x) = &cfg.x0 {
        if x.len() != cfg.problem.dim {
            return Err(LabError::parse(
                0,
                "x0",
                format!("has {} entries but dim is {}", x.len(), cfg.problem.dim),
            ));
        }
    }

    let list = methods.unwrap_or_else(|| DEFAULT_METHODS.to_vec());
    let mut resolved: Vec<SweepConfig> = list
        .iter()
        .map(|&method| SweepConfig {
            method,
            ..cfg.defaults.clone()
        })
        .collect();
    for (line, method, field, value) in &overrides {
        let key = format!("{method}.{field}");
        let Some(target) = resolved.iter_mut().find(|c| c.method == *method) else {
            return Err(LabError::parse(
                *line,
                &key,
                format!("{method} is not in the method list (line {method_line})"),
            ));
        };
        apply_sweep_key(target, *line, &key, field, value)?;
    }
    cfg.methods = resolved;
    Ok(cfg)
}

fn sweep_entries(c: &SweepConfig) -> [(&'static str, String); 8] {
    [
        ("m", c.m.to_string()),
        ("d", c.d.to_string()),
        ("k", c.k.to_string()),
        ("tol", format!("{:e}", c.tol)),
        ("max_iter", c.max_iter.to_string()),
        ("rank_tol", format!("{:e}", c.rank_tol)),
        ("detector", c.detector_enabled.to_string()),
        ("ritz_path", c.ritz_path.as_str().to_string()),
    ]
}

/// Writes a document that [`parse_config`] reads back to an equal config.
pub fn serialize_config(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    let p = &cfg.problem;
    let _ = writeln!(out, "dim = {}", p.dim);
    let _ = writeln!(out, "lambda1 = {:e}", p.lambda1);
    let _ = writeln!(out, "ratio = {:e}", p.ratio);
    let _ = writeln!(out, "b_low = {:e}", p.b_low);
    let _ = writeln!(out, "b_high = {:e}", p.b_high);
    let _ = writeln!(out, "seed = {}", p.seed);
    let names: Vec<&str> = cfg.methods.iter().map(|c| c.method.as_str()).collect();
    let _ = writeln!(out, "method = {}", names.join(", "));
    for (key, value) in sweep_entries(&cfg.defaults) {
        let _ = writeln!(out, "{key} = {value}");
    }
    for c in &cfg.methods {
        let base = sweep_entries(&SweepConfig {
            method: c.method,
            ..cfg.defaults.clone()
        });
        for ((key, value), (_, default)) in sweep_entries(c).into_iter().zip(base) {
            if value != default {
                let _ = writeln!(out, "{}.{key} = {value}", c.method);
            }
        }
    }
    let x0 = match &cfg.x0 {
        StartPoint::Zero => "zero".to_string(),
        StartPoint::Minimizer => "minimizer".to_string(),
        StartPoint::Explicit(x) => x.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(", "),
    };
    let _ = writeln!(out, "x0 = {x0}");
    let _ = writeln!(out, "out = {}", cfg.out_dir.display());
    let cps: Vec<String> = cfg.checkpoints.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "checkpoints = {}", cps.join(", "));
    let _ = writeln!(out, "repeat = {}", cfg.repeat);
    out
}
