use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("qubit {qubit} out of range for {n} qubits")]
    OutOfRange { qubit: usize, n: usize },
    #[error("at most 64 qubits are supported, got {0}")]
    TooManyQubits(usize),
    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    RepeatedQubit(usize),
    #[error("cannot parse Pauli string {0:?}")]
    ParsePauli(String),
    #[error("circuit construction: {0}")]
    Circuit(String),
    #[error("label mismatch while composing effects")]
    LabelMismatch,
    #[error("bias undefined for an all-zero distribution")]
    UndefinedBias,
    #[error("invalid noise specification: {0}")]
    Noise(String),
    #[error("invalid tomography circuit id: {0}")]
    TomographyId(String),
    #[error("no accepted probability mass for circuit {0}")]
    NoAcceptedMass(String),
    #[error("reconstruction inconsistency: {0}")]
    Reconstruction(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("enumeration too large: {configs:.3e} configurations (estimated {seconds:.0} s); pass --force to run anyway")]
    TooExpensive { configs: f64, seconds: f64 },
    #[error("dense oracle limited to {max} qubits, asked for {asked}")]
    OracleTooLarge { max: usize, asked: usize },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
