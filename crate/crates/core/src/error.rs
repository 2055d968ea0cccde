use thiserror::Error;

/// Every failure the engine can report.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("generator `{0}` has no assigned value")]
    MissingGenerator(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degree {degree} lies outside the known window [{min}, {max}]")]
    OutOfWindow { degree: i32, min: i32, max: i32 },
    #[error("degenerate spectral curve: t3 = 2")]
    DegenerateCurve,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("(g, n) = ({g}, {n}) is not a stable pair")]
    UnstablePair { g: u32, n: u32 },
    #[error("free energy needs g >= 2, got g = {0}")]
    InvalidGenus(u32),
    #[error("curve times are only known up to t_{known}; target needs t_{needed}")]
    InsufficientOrder { known: u32, needed: u32 },
    #[error("singular coefficient system: {0}")]
    SingularSystem(String),
    #[error("curve times are not independent formal generators: {0}")]
    NonFormalTimes(String),
    #[error("psi exponents sum to {sum}, expected 3g - 3 + n = {expected}")]
    DimensionMismatch { sum: u32, expected: i64 },
}

pub type Result<T> = std::result::Result<T, Error>;
