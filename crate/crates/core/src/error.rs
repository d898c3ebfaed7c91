use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("constant polynomial has no discriminant")]
    ConstantPolynomial,
    #[error("endpoint vanishes")]
    EndpointVanishes,
    #[error("empty interval: lower endpoint must be strictly below upper endpoint")]
    EmptyInterval,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation requires n = {expected}, got n = {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("degenerate plane: vectors are linearly dependent")]
    DegeneratePlane,
    #[error("operator violates the first Bianchi identity")]
    NotBianchi,
    #[error("operator is not Q-symmetric for the given signature")]
    NotQSymmetric,
    #[error("signature {nu} out of range for n = {n}")]
    BadSignature { n: usize, nu: usize },
    #[error("size cap: problem dimension {dim} exceeds cap {cap}")]
    SizeCap { dim: usize, cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
