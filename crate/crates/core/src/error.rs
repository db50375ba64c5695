use thiserror::Error;

/// Crate-wide error type. Variants map onto the CLI exit codes:
/// invalid arguments (2), construction failures (3), embedding failures (4),
/// verification mismatches (5).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("construction failure in {stage}: {detail}")]
    ConstructionFailure { stage: &'static str, detail: String },

    #[error("embedding failure at clock {clock} (tree vertex {tree_vertex}): {detail}")]
    EmbeddingFailure {
        clock: usize,
        tree_vertex: usize,
        detail: String,
        /// JSON snapshot of the embedder state at the point of failure.
        snapshot: String,
    },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("verification mismatch: {0}")]
    VerificationMismatch(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn construction(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::ConstructionFailure { stage, detail: detail.into() }
    }

    /// Exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Parse(_) => 2,
            Error::ConstructionFailure { .. } | Error::Infeasible(_) => 3,
            Error::EmbeddingFailure { .. } => 4,
            Error::VerificationMismatch(_) => 5,
            Error::Io(_) => 2,
        }
    }
}
