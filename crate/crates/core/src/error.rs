//! Crate-wide error type.
//!
//! Diagnostic payloads are stored as `f64` regardless of the scalar type in
//! use, so the error enum stays non-generic.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("trace is {trace} but must be 1")]
    TraceNotOne { trace: f64 },

    #[error("state is not normalized (norm squared {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("invalid target spec: {0}")]
    InvalidSpec(String),

    #[error("POVM completeness violated: |M1'M1 + M2'M2 - I| = {deviation:.3e}")]
    CompletenessViolation { deviation: f64 },

    #[error("POVM element E{index} is not positive (min eigenvalue {min_eigenvalue:.3e})")]
    ElementNotPositive { index: u8, min_eigenvalue: f64 },

    #[error(
        "right singular frames of the pair do not differ by a diagonal unitary \
         (off-diagonal magnitude {off_diagonal:.3e}); the operators are inconsistent"
    )]
    InconsistentPair { off_diagonal: f64 },

    #[error("measurement outcome index {0} is not 1 or 2")]
    InvalidOutcomeIndex(u8),

    #[error("angle out of range: {0}")]
    InvalidAngle(String),

    #[error("branch has zero probability; post-state undefined")]
    ZeroProbabilityBranch,

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid noise config: {0}")]
    InvalidNoiseConfig(String),

    #[error("calibration target unreachable: {0}")]
    UnreachableTarget(String),

    #[error("basis {basis} has no counts")]
    EmptyBasis { basis: &'static str },

    #[error("optimizer did not converge within {iterations} iterations")]
    NonConvergence { iterations: u32 },
}
