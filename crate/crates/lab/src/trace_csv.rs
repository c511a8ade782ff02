//! Trace CSV: header `iter,f,gnorm,alpha,phase,sweep_id,events`, floats
//! with 17 significant digits, events `|`-separated (empty field when none).

use std::fmt::Write as _;

use lmsd_core::sweeps::{Events, Phase, TraceRecord};

use crate::error::{LabError, Result};

pub const HEADER: &str = "iter,f,gnorm,alpha,phase,sweep_id,events";

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_trace(records: &[TraceRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.iter,
            float(r.f),
            float(r.gnorm),
            float(r.alpha),
            r.phase,
            r.sweep_id,
            r.events
        );
    }
    out
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == HEADER => {}
        _ => {
            return Err(LabError::Csv {
                line: 1,
                message: format!("expected header {HEADER:?}"),
            })
        }
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let bad = |message: String| LabError::Csv {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(bad(format!("expected 7 fields, found {}", fields.len())));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|e| bad(format!("field {i}: {e}")))
        };
        records.push(TraceRecord {
            iter: fields[0].parse().map_err(|e| bad(format!("iter: {e}")))?,
            f: num(1)?,
            gnorm: num(2)?,
            alpha: num(3)?,
            phase: fields[4]
                .parse::<Phase>()
                .map_err(|e| bad(format!("phase: {e}")))?,
            sweep_id: fields[5].parse().map_err(|e| bad(format!("sweep_id: {e}")))?,
            events: fields[6]
                .parse::<Events>()
                .map_err(|e| bad(format!("events: {e}")))?,
        });
    }
    Ok(records)
}
