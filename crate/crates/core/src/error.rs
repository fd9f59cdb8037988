use thiserror::Error;

/// Errors raised by the simulator, the protocol layer and the persistence formats.
#[derive(Debug, Error)]
pub enum SealError {
    #[error("qubit index {index} out of range for {len} qubits")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("duplicate qubit index {0}")]
    DuplicateIndex(usize),

    #[error("register capacity exceeded: {requested} qubits requested, at most {max} supported")]
    CapacityExceeded { requested: usize, max: usize },

    #[error("register size mismatch: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },

    #[error("basis-state index {index} does not fit in {width} qubits")]
    BasisStateOutOfRange { index: usize, width: usize },

    #[error("projector index set is empty")]
    EmptyProjector,

    #[error("message must contain at least one bit")]
    EmptyMessage,

    #[error("grant must name at least one qubit")]
    EmptyGrant,

    #[error("invalid bit value {0}; expected 0 or 1")]
    InvalidBit(u8),

    #[error("memory holds {memory} qubits but the seal record describes {record}")]
    LengthMismatch { memory: usize, record: usize },

    #[error("unknown attack strategy `{0}`")]
    UnknownStrategy(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("unsupported document version {found}; expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("malformed document: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = SealError> = std::result::Result<T, E>;
