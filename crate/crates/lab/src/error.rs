use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("line {line}: invalid value for `{key}`: {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed trace CSV at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("out of range: {0}")]
    Range(String),

    #[error(transparent)]
    Core(#[from] lmsd_core::Error),
}

impl LabError {
    pub(crate) fn parse(line: usize, key: &str, message: impl Into<String>) -> Self {
        LabError::Parse {
            line,
            key: key.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    /// Key named by a parse error, if any.
    pub fn key(&self) -> Option<&str> {
        match self {
            LabError::Parse { key, .. } => Some(key),
            _ => None,
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
