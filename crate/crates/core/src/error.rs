use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("argument outside the validated domain: {0}")]
    DomainError(String),

    #[error("branch cut proximity: |mu^2 - 1| = {dist:.3e} < 1e-12")]
    BranchCutProximity { dist: f64 },

    #[error("loss of precision: estimated relative error {estimate:.3e} exceeds {limit:.3e}")]
    PrecisionLoss { estimate: f64, limit: f64 },

    #[error("quadrature did not converge: error estimate {estimate:.3e} after {segments} segments")]
    QuadratureNotConverged { estimate: f64, segments: usize },

    #[error("non-positive weight a_{index} = {value:.6e}")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("operator is not admissible: {0}")]
    NotAdmissible(String),

    #[error("series tail did not reach tolerance within the horizon: achieved {achieved:.3e}, requested {requested:.3e}")]
    TailNotConverged { achieved: f64, requested: f64 },

    #[error("overflow guard: {0}")]
    OverflowGuard(String),

    #[error("sequence does not cover the requested index range: {0}")]
    IndexCoverage(String),

    #[error("eigensolver failed to converge at index {index}")]
    EigensolverStuck { index: usize },

    #[error("Jost function is numerically degenerate: |F| = {modulus:.3e}")]
    DegenerateJost { modulus: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
