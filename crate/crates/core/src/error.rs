use thiserror::Error;

/// Errors raised by problem construction, factorizations, steplength
/// formulas and the sweep drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("shape mismatch: expected length {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("nonpositive curvature s'y = {0:e}")]
    Curvature(f64),

    #[error("rank deficient factorization at column {index}")]
    RankDeficient { index: usize },

    #[error("ill-conditioned Gram matrix at column {index}")]
    IllConditioned { index: usize },

    #[error("eigensolver failed to converge for eigenvalue {index}")]
    EigenFailure { index: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Run {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Shape { expected, found })
    }
}
