use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SiegelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("imaginary part is not positive definite")]
    NotPositiveDefinite,

    #[error("matrix is not symplectic (residual {0:.3e})")]
    NotSymplectic(f64),

    #[error("CZ+D is numerically singular (condition number {0:.3e})")]
    SingularDenominator(f64),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("reduction did not converge within {0} iterations")]
    IterationLimit(usize),

    #[error("integer overflow in exact symplectic arithmetic")]
    Overflow,

    #[error("point {0} lies within {1:.1e} of a lattice point")]
    PoleProximity(String, f64),

    #[error("plumbing parameter |t| = {abs:.3e} outside the expansion radius {radius:.3e}")]
    ExpansionDomain { abs: f64, radius: f64 },

    #[error("arg t = {0} is on the principal-branch cut of log")]
    BranchAmbiguity(f64),

    #[error("invalid permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("candidate rank {k} out of range 0..={g}")]
    RankOutOfRange { k: usize, g: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl SiegelError {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            SiegelError::SingularDenominator(_)
                | SiegelError::NumericalFailure(_)
                | SiegelError::IterationLimit(_)
                | SiegelError::Overflow
                | SiegelError::NotPositiveDefinite
                | SiegelError::PoleProximity(..)
        )
    }
}

pub type Result<T> = std::result::Result<T, SiegelError>;
