use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("form is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("invalid level {0}")]
    InvalidLevel(u64),
    #[error("characteristic {p} divides the order of a cell stabilizer")]
    UnsupportedCharacteristic { p: u64 },
    #[error("{0} is not a prime in the supported range")]
    NotPrime(u64),
    #[error("operation needs field coefficients; use integral_cohomology for Z")]
    NeedsField,
    #[error("integer budget exceeded: {0}")]
    Resource(String),
    #[error("operators do not commute")]
    NonCommuting,
    #[error("invalid Hecke operator T({ell},{k})")]
    InvalidOperator { ell: u64, k: usize },
    #[error("Hecke operator at {ell} is undefined at level {level}")]
    BadPrime { ell: u64, level: u64 },
    #[error("reduction did not terminate after {steps} steps; offending sharbly {sharbly}")]
    ReductionCap { steps: usize, sharbly: String },
    #[error("no lift inside the Weil window: {0}")]
    OutOfBounds(String),
    #[error("dimension mismatch: packets cover {packets}, Betti number is {betti}")]
    DimensionMismatch { packets: usize, betti: usize },
    #[error("level {0} is not prime; predictions cover prime levels only")]
    CompositeLevel(u64),
    #[error("missing data: {0}")]
    DataGap(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("validation error at line {line}: {msg}")]
    Validation { line: usize, msg: String },
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
