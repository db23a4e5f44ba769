use std::path::PathBuf;

use thiserror::Error;

use max2sat_core::analysis::AnalysisError;
use max2sat_core::chimera::GraphError;
use max2sat_core::ensemble::EnsembleError;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot read config {path}: {source}")]
    ConfigIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("ensemble rejected (clause capacity of the hardware graph): {0}")]
    Ensemble(#[from] EnsembleError),
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("budget exhausted: {unsolved} of {total} instances not proven optimal (partial results written)")]
    BudgetExhausted { unsolved: usize, total: usize },
    #[error("analysis failed: {0}")]
    Analysis(#[from] AnalysisError),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("malformed {path}: {msg}")]
    Malformed { path: PathBuf, msg: String },
}

impl BenchError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            BenchError::Config(_) | BenchError::ConfigIo { .. } | BenchError::ConfigParse { .. } => EXIT_CONFIG,
            BenchError::Ensemble(_) | BenchError::Graph(_) | BenchError::Validation(_) | BenchError::Malformed { .. } => {
                EXIT_VALIDATION
            }
            BenchError::BudgetExhausted { .. } => EXIT_BUDGET,
            BenchError::Analysis(_) => EXIT_VALIDATION,
            BenchError::Io { .. } | BenchError::Csv { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> BenchError {
        let path = path.into();
        move |source| BenchError::Io { path, source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> BenchError {
        let path = path.into();
        move |source| BenchError::Csv { path, source }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
