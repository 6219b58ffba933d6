//! Crate-wide error type.

use nalgebra::DMatrix;

use crate::Complex64;

/// Errors produced by sampling, spectral and potential-theory routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Dimension or parameter validation failed.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A truncation was requested that does not shrink the matrix.
    #[error("invalid truncation: block size {n} must be smaller than the matrix size {m}")]
    InvalidTruncation { m: usize, n: usize },

    /// The iterative eigensolver did not converge; the offending matrix is
    /// carried so that the failing draw can be reproduced.
    #[error("eigensolver failed to converge on a {rows}x{cols} matrix: {matrix}")]
    EigensolverFailure {
        rows: usize,
        cols: usize,
        matrix: Box<DMatrix<Complex64>>,
    },

    /// A Ginibre draw was numerically singular even after one retry.
    #[error("numerically singular Ginibre draw persisted after regeneration")]
    SingularDraw,

    /// A measure carries mass too close to the unit circle for the weighted
    /// functional to be finite.
    #[error("singular measure: {0}")]
    SingularMeasure(String),

    /// A measure violates a structural invariant (grid ordering, mass,
    /// nonnegativity).
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    /// Two tables that must share a grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A weight failed one of the conditions required by the radial
    /// equilibrium solver; the violated condition is named.
    #[error("weight condition violated: {0}")]
    WeightCondition(String),

    /// A parameter is outside the supported domain.
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// An internal numerical cross-check disagreed beyond tolerance.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
