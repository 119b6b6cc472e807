use thiserror::Error;

use crate::instance::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(ValidationReport),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("inconsistent model options: {0}")]
    ModelOptions(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("assignment has more rows ({rows}) than columns ({cols})")]
    AssignmentShape { rows: usize, cols: usize },

    #[error("cannot decode tour: {0}")]
    Decode(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
