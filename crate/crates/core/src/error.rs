//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("invalid circuit: {0}")]
    Circuit(String),

    #[error("geometry exhausted: {0}")]
    Geometry(String),

    #[error("routing failure: {0}")]
    Routing(String),

    #[error("no feasible assignment")]
    InfeasibleAssignment,

    #[error("no path between sites")]
    Unreachable,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("schedule failed validation with {0} diagnostic(s)")]
    InvalidSchedule(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
