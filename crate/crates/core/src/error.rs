use thiserror::Error;

use crate::linalg::LinalgError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error("qubit index {index} is invalid for a {n_qubits}-qubit register")]
    InvalidQubitIndex { index: usize, n_qubits: usize },

    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("count mismatch: {inputs} inputs vs {outputs} outputs")]
    CountMismatch { inputs: usize, outputs: usize },

    #[error("label bit vector is empty")]
    EmptyLabel,

    #[error("state is not an encoded label (qubit {qubit})")]
    NotAnEncodedLabel { qubit: usize },

    #[error("need at least {needed} items, got {got}")]
    TooSmall { needed: usize, got: usize },

    #[error("expected {expected} rotation angles, got {got}")]
    ThetaCountMismatch { expected: usize, got: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical kernels (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Linalg(LinalgError::NoConvergence(_))
                | Error::Linalg(LinalgError::NotPsd { .. })
                | Error::Linalg(LinalgError::NonFinite)
        )
    }
}
