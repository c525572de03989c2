//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong in the arithmetic, series, and verification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotAnOddPrime(u64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live over different coefficient rings")]
    RingMismatch,
    #[error("series is not a unit in the adic ring: {0}")]
    NotAUnit(String),
    #[error("monomial {0} falls below the Laurent floor of the window")]
    FloorUnderflow(String),
    #[error("truncation window too shallow: {0}")]
    TruncationTooShallow(String),
    #[error("matrices are expressed in different bases")]
    BasisMismatch,
    #[error("order {0} is not invertible in the coefficient ring")]
    NonInvertibleOrder(u32),
    #[error("flat-endomorphism recursion does not close at q^{0}")]
    InconsistentSystem(u32),
    #[error("endomorphism is not covariantly constant")]
    NotFlat,
    #[error("polynomial division is not exact")]
    DivisionNotExact,
    #[error("cannot specialize a series whose h-expansion is truncated")]
    InexactSpecialization,
}

pub type Result<T> = std::result::Result<T, Error>;
