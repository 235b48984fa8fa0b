use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("criteria count {0} outside supported range 2..=20")]
    CriteriaCount(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("criterion {index} out of range for {count} criteria")]
    CriterionOutOfRange { index: usize, count: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value {value} at row {row}, column {column} is outside [0, 1]")]
    Domain { row: usize, column: usize, value: f64 },

    #[error("non-finite value at position {0}")]
    NotFinite(usize),

    #[error("conditional expectation of order {0} is not supported (at most 2)")]
    UnsupportedOrder(usize),

    #[error("total output variance is zero; normalized index is undefined")]
    UndefinedNormalization,

    #[error("zero variance; correlation is undefined")]
    UndefinedCorrelation,

    #[error("invalid capacity: {0}")]
    InvalidCapacity(String),

    #[error("infeasible point: {0}")]
    Infeasible(String),

    #[error("invalid generation spec: {0}")]
    Spec(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
