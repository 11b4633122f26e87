use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("mismatched primes: {0} and {1}")]
    PrimeMismatch(u64, u64),
    #[error("malformed number {0:?}")]
    MalformedNumber(String),
    #[error("invalid mask: {0}")]
    InvalidMask(String),
    #[error("index set is not admissible for the transition operator at {0}")]
    NotAdmissible(String),
    #[error("vector support leaves the index set at {0}")]
    OutsideIndexSet(String),
    #[error("subspace is not invariant under the operator")]
    NotInvariant,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("eigenvalue computation did not converge (residual {0:e})")]
    NoConvergence(f64),
    #[error("exponent q must satisfy 1 <= q <= inf, got {0}")]
    InvalidExponent(String),
    #[error("mask is not certified convergent: {0}")]
    NotConvergent(String),
    #[error("wavelet completion failed: {0}")]
    Completion(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}
