use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, PowregError>;

#[derive(Debug, Error)]
pub enum PowregError {
    /// An argument fell outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("root finder did not converge after {iterations} iterations (q={q}, omega={omega}, |b|={b_abs})")]
    RootNotConverged {
        iterations: usize,
        q: f64,
        omega: f64,
        b_abs: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate index {index} out of range for {p} columns")]
    IndexOutOfRange { index: usize, p: usize },

    #[error("column {index} of the design matrix is identically zero")]
    ZeroColumn { index: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV parse failure: {0}")]
    Csv(#[from] csv::Error),

    #[error("non-numeric value {value:?} in column {column:?} at data row {row}")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("column {0:?} is constant (zero variance)")]
    ConstantColumn(String),

    #[error("response column {0:?} not found in header")]
    MissingResponse(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
}

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> PowregError {
    PowregError::Domain {
        op,
        detail: detail.into(),
    }
}
