//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CcdoError {
    #[error("unknown problem variant: {0}")]
    UnknownVariant(String),

    #[error("no feasible point found for {problem} under environment ({env})")]
    NoFeasiblePoint { problem: String, env: String },

    #[error("empty error trace")]
    EmptyTrace,

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = CcdoError> = std::result::Result<T, E>;
