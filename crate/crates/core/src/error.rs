use std::fmt;

/// Errors raised by the algorithms in this crate.
///
/// Outcomes that are ordinary results of an algorithm (a singular matrix, a
/// failed Φ-map construction, a rejecting protocol run) are values, not errors.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} refused for n = {n}: guard is n <= {guard} ({estimate})")]
    GuardExceeded {
        what: &'static str,
        n: usize,
        guard: usize,
        estimate: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("simplex iteration cap of {cap} exceeded (objective {objective}, {rows} rows, {cols} columns)")]
    IterationCap {
        cap: usize,
        objective: String,
        rows: usize,
        cols: usize,
    },

    #[error("sampler failed after {attempts} attempts: best distance {best} > target {target}")]
    SamplingFailed {
        attempts: usize,
        best: String,
        target: String,
    },

    #[error("protocol fault: {0}")]
    Protocol(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Human readable operation count used in guard refusals.
pub(crate) struct CostEstimate(pub f64);

impl fmt::Display for CostEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "~{:.3e} elementary operations", self.0)
    }
}
