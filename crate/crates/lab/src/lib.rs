//! Experiment harness around `lmsd_core`: configuration documents, trace
//! CSV and summary files, multi-method runs and checkpoint comparisons.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compare;
pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod summary;
pub mod trace_csv;

pub use compare::{compare_methods, compare_traces, CheckpointRow, ComparisonReport};
pub use config::{parse_config, serialize_config, ExperimentConfig, ProblemSpec, StartPoint};
pub use error::{LabError, Result};
pub use experiment::{execute, load_trace, run_experiment, trace_file_name, ExperimentOutput, MethodRun};
