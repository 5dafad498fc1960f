use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix of dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{requested} qubits exceed the configured maximum of {max}")]
    TooManyQubits { requested: usize, max: usize },

    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("Kraus set is not complete (max deviation from identity {0:e})")]
    IncompleteKraus(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("qubit index {index} out of range for {count} qubits")]
    InvalidQubit { index: usize, count: usize },

    #[error("partial trace needs at least one kept qubit")]
    EmptyKeepSet,

    #[error("bit string length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid bit string: {0}")]
    InvalidBits(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("query budget exhausted at data qubit {index}: {required} queries needed, cap is {cap}")]
    BudgetExhausted { index: usize, required: u64, cap: u64 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
