use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid pure state: norm {0}")]
    InvalidPureState(f64),

    #[error("eigendecomposition did not converge for a {0}x{0} matrix")]
    EigenDecomposition(usize),

    #[error("pauli string {index} has length {found}, expected {expected}")]
    InconsistentPauliLength { index: usize, expected: usize, found: usize },

    #[error("invalid pauli label {0:?}")]
    InvalidPauliLabel(char),

    #[error("{0} qubits exceeds the supported maximum of {1}")]
    TooManyQubits(usize, usize),

    #[error("target qubit {target} out of range for {n_qubits} qubits")]
    TargetOutOfRange { target: usize, n_qubits: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("parameter vector has length {found}, circuit expects {expected}")]
    ParameterCountMismatch { expected: usize, found: usize },

    #[error("parameter index {index} out of range for {n_params} parameters")]
    ParameterIndexOutOfRange { index: usize, n_params: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("analytic derivative unsupported for parameter {0}: its noise depends on the gate angle")]
    UnsupportedAnalyticDerivative(usize),

    #[error("density matrix is numerically zero: no eigenvalue above the rank threshold")]
    ZeroRank,

    #[error("measurement basis is not orthonormal (deviation {0:e})")]
    NonOrthonormalBasis(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
