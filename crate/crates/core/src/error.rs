use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NotPrime: {0} is not prime")]
    NotPrime(u64),
    #[error("EvenCharacteristic: q = 2 is not an odd field")]
    EvenCharacteristic,
    #[error("ZeroArgument: {0} must be nonzero")]
    ZeroArgument(&'static str),
    #[error("InvalidDimension: {0}")]
    InvalidDimension(String),
    #[error("DimensionMismatch: expected ambient dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("EmptyDomain: norm over an empty point set")]
    EmptyDomain,
    #[error("EmptyVariety: {0}")]
    EmptyVariety(String),
    #[error("InvalidExponent: {0}")]
    InvalidExponent(String),
    #[error("OutOfRangeValue: F({index}) = {value} lies outside [0, 1]")]
    OutOfRangeValue { index: usize, value: f64 },
    #[error("NotNormalized: sum of F^p is {0}, expected 1")]
    NotNormalized(f64),
    #[error("BudgetExceeded: {what} needs {needed}, cap is {cap}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        cap: u128,
    },
    #[error("SearchFailed: {0}")]
    SearchFailed(String),
    #[error("ZeroFunction: ratio undefined for g = 0")]
    ZeroFunction,
    #[error("InvalidK: k = {k} outside 0..={max}")]
    InvalidK { k: i64, max: i64 },
    #[error("NotContained: affine subspace point {0:?} is not on the sphere")]
    NotContained(Vec<u64>),
    #[error("NotHomogeneous: g(λm) != g(m) at index {0}")]
    NotHomogeneous(usize),
    #[error("UnsupportedVariety: {0}")]
    UnsupportedVariety(String),
    #[error("IdentityViolation: {check}: {lhs} vs {rhs} (tolerance {tol})")]
    IdentityViolation {
        check: &'static str,
        lhs: f64,
        rhs: f64,
        tol: f64,
    },
    #[error("Parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
