use qss_core::QssError;
use thiserror::Error;

use crate::roles::Party;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Core(#[from] QssError),

    #[error("locality violation: {party} asked to act on qubit {qubit} it does not own")]
    Locality { party: Party, qubit: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("threshold not met: {have} shares for threshold {need}")]
    Threshold { have: usize, need: usize },

    #[error("test-set certification failed: {0}")]
    Certification(String),
}

impl ProtocolError {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        ProtocolError::Argument(msg.into())
    }
}

pub type Result<T, E = ProtocolError> = std::result::Result<T, E>;
