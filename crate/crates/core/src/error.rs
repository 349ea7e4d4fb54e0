use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("polynomial {0} is reducible over GF({1})")]
    Reducible(String, u32),
    #[error("trace is bijective when t = 1, its kernel is trivial")]
    EmptyKernel,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("elements are linearly dependent over the subfield")]
    Rank,
    #[error("element is not in the span of the basis")]
    NotInSpan,
    #[error("expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("check polynomial is identically zero")]
    ZeroPolynomial,
    #[error("evaluations are inconsistent with any polynomial of degree < {0}")]
    Corruption(usize),
    #[error("scheme not applicable: {0}")]
    Inapplicable(String),
    #[error("missing repair data from node index {0}")]
    Incomplete(usize),
    #[error("sequencing error: {0}")]
    Sequencing(String),
    #[error("unsupported failure count {0} (1 or 2 supported)")]
    UnsupportedFailureCount(usize),
    #[error("parse error: {0}")]
    Parse(String),
}
