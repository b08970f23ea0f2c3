use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("size mismatch: operands act on {left} and {right} qubits")]
    SizeMismatch { left: usize, right: usize },

    #[error("invalid code definition: {0}")]
    CodeDefinition(String),

    #[error("invalid instruction: {0}")]
    InvalidInstruction(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("qubit {q} out of range for a register of {n} qubits")]
    QubitOutOfRange { q: usize, n: usize },

    #[error("qubit {0} is not live (measured or never prepared)")]
    DeadQubit(usize),

    #[error("invalid fault: {0}")]
    InvalidFault(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("unknown experiment kind `{0}`")]
    UnknownKind(String),
}

pub type Result<T> = std::result::Result<T, Error>;
