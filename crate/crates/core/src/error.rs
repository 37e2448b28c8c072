use thiserror::Error;

/// Errors surfaced by the library. Every variant describes bad input or an exhausted budget;
/// internal inconsistencies panic instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not square")]
    NotSquare,
    #[error("Gram matrix is degenerate")]
    Degenerate,
    #[error("lattice is odd, so its discriminant quadratic form is undefined")]
    OddLattice,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("basis is rank deficient")]
    RankDeficient,
    #[error("lattice is not definite")]
    Indefinite,
    #[error("rescaling factor must be nonzero")]
    ZeroScale,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("glue class is not isotropic or not pairwise orthogonal: {0}")]
    BadGlue(String),
    #[error("enumeration budget of {0} exceeded")]
    Budget(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
