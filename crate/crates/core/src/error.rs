use std::path::PathBuf;

/// Errors raised by model construction, rate computations, decoding and experiment I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidPmf(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("no permutation has finite weight")]
    Infeasible,

    #[error("optimizer did not converge after {iterations} iterations (last change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },

    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: f64, budget: f64 },

    #[error("bound violated at K = {k}: trace {trace:e} > exp(-K psi2) = {bound:e}")]
    BoundViolated { k: usize, trace: f64, bound: f64 },

    #[error("invariant failed: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("cell [{cell}]: {source}")]
    Cell {
        cell: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}

impl Error {
    /// Input problems (bad parameters, files or plans), as opposed to failures during a run.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::InvalidPmf(_)
            | Error::InvalidChannel(_)
            | Error::Dimension(_)
            | Error::LengthMismatch { .. }
            | Error::OutOfRange(_)
            | Error::Parse(_)
            | Error::Json(_)
            | Error::BudgetExceeded { .. } => true,
            Error::Cell { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
