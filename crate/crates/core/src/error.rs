use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lambda must be a nonzero integer")]
    ZeroLambda,

    #[error("argument must be nonnegative, got {0}")]
    NegativeArgument(f64),

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: usize, right: usize },

    #[error("coefficient vector has length {got}, expected |lambda| = {expected}")]
    CoefficientLength { expected: usize, got: usize },

    #[error("window hypothesis 8A < lambda violated (lambda = {lambda}, A = {a})")]
    WindowTooWide { lambda: u64, a: u64 },

    #[error("tolerance {tol} unreachable within lattice radius cap {cap}")]
    TruncationUnreachable { tol: f64, cap: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
