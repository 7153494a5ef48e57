use std::path::PathBuf;

use chrono::NaiveDate;

/// Errors raised anywhere in the forecasting pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid calendar: {0}")]
    InvalidCalendar(String),

    #[error("{0} is not a trading day")]
    NonTradingDay(NaiveDate),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: timestamp does not advance past the previous row")]
    NonMonotonic { path: PathBuf, line: usize },

    #[error("{path}:{line}: value {value} is not strictly positive")]
    NonPositiveValue {
        path: PathBuf,
        line: usize,
        value: f64,
    },

    #[error("{path}:{line}: {message}")]
    OffGrid {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("no stamp in the requested span carries a value for every series")]
    EmptyIntersection,

    #[error("panel has {len} rows, need more than the lag gap of {gap}")]
    TooShort { len: usize, gap: usize },

    #[error("expected {expected} columns, got {actual}")]
    ColumnMismatch { expected: usize, actual: usize },

    #[error("length mismatch: {left} actuals vs {right} predictions")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("actual value at index {0} is zero")]
    ZeroActual(usize),

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparameters(String),

    #[error("training data rejected: {0}")]
    DegenerateData(String),

    #[error("training loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("insufficient history: {0}")]
    InsufficientHistory(String),

    #[error("malformed model file: {0}")]
    MalformedModel(String),

    #[error("malformed report: {0}")]
    MalformedReport(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
