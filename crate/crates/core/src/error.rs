use thiserror::Error;

/// Maximum number of qubits any state or operator may span.
pub const MAX_QUBITS: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QssError {
    #[error("system of {requested} qubits exceeds the {max}-qubit cap", max = MAX_QUBITS)]
    Capacity { requested: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("zero-probability branch requested: {0}")]
    ZeroProbability(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl QssError {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        QssError::Argument(msg.into())
    }
}

pub type Result<T, E = QssError> = std::result::Result<T, E>;
