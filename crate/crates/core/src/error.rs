use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("window does not tile at hop {hop}: overlap-added energy varies by {deviation:.3e} (relative)")]
    NonTileableWindow { hop: usize, deviation: f64 },

    #[error("inconsistent mask: {0}")]
    InconsistentMask(String),

    #[error("inconsistent input: {0}")]
    InconsistentInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("model order {order} must be smaller than the signal length {len}")]
    InvalidOrder { order: usize, len: usize },

    #[error("degenerate signal: zero-lag autocorrelation is {0}")]
    DegenerateSignal(f64),

    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("no reliable data to anchor the reconstruction")]
    NoReliableData,

    #[error("context window of {available} samples is shorter than order + gap length ({required})")]
    InsufficientContext { available: usize, required: usize },

    #[error("cannot place {n_gaps} gaps of {gap_len} columns in {t_total} columns (margin {margin}, separation {separation})")]
    CannotPlaceGaps {
        t_total: usize,
        gap_len: usize,
        n_gaps: usize,
        margin: usize,
        separation: usize,
    },

    #[error("reference signal has zero energy")]
    UndefinedReference,

    #[error("need at least {required} values, got {got}")]
    InsufficientData { required: usize, got: usize },

    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
