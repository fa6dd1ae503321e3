use thiserror::Error;

/// Every failure the engine reports. Divergence and domain errors name the
/// inequality that failed so a caller can see which hypothesis broke.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variable mismatch: {left} vs {right}")]
    VariableMismatch { left: String, right: String },

    #[error("endpoints have the same sign; no bracketed sign change")]
    SameSignEndpoints,

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("exponent parity does not descend to the base moment: {0}")]
    ParityMismatch(String),

    #[error("parameter outside domain: {0}")]
    Domain(String),

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("no real critical coefficient: discriminant {0} is negative")]
    NoRealRoot(String),

    #[error("key not present in the printed table: {0}")]
    NotTabulated(String),

    #[error("quadrature did not converge (achieved relative error {achieved:e})")]
    Quadrature { achieved: f64 },

    #[error("interpolation inconsistency: {0}")]
    Interpolation(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
