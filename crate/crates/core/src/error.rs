use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Vectors or candidates whose shape does not match the space they are used with.
    #[error("structural error: {0}")]
    Structural(String),

    /// A candidate that violates a model's validity predicate.
    #[error("invalid candidate: {0}")]
    Validity(String),

    /// A representative was used before its objectives were computed.
    #[error("candidate {0} has not been evaluated")]
    Unevaluated(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("normalization error: {0}")]
    Normalization(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("formula is unsatisfiable")]
    Unsatisfiable,

    #[error("solver failure: {0}")]
    Solver(String),

    /// Model definition problems (bad scenario tables, broken CNF files).
    #[error("model error: {0}")]
    Model(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("not enough samples: {0}")]
    InsufficientSamples(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }
}
