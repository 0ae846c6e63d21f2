use thiserror::Error;

/// Errors raised by the geometry, map and search routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContactError {
    #[error("point has zero or non-finite norm")]
    DegeneratePoint,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("map is not an orientation-preserving contactomorphism at this point (alpha(dphi R) = {0})")]
    NotOrientationPreserving(f64),

    #[error("tangent basis is degenerate (smallest singular value {0:.3e})")]
    DegenerateBasis(f64),

    #[error("matrix does not preserve the signature form (residual {0:.3e})")]
    NotInUnitaryGroup(f64),

    #[error("projective image is undefined: zeroth homogeneous coordinate {0:.3e}")]
    VanishingDenominator(f64),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("not a diffeomorphism of the circle: derivative {value:.3e} at theta = {theta:.6}")]
    InvalidDiffeomorphism { theta: f64, value: f64 },
}

pub type Result<T> = std::result::Result<T, ContactError>;
