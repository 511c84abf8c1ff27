//! Crate error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The dense kernel only handles matrices up to dimension 8.
    #[error("matrix dimension {0} exceeds the kernel limit of {max}", max = crate::numerics::MAX_DIM)]
    DimensionTooLarge(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Eigeniteration failed to deflate within the iteration budget.
    #[error("eigendecomposition did not converge for {matrix}: {detail}")]
    EigNonConvergence { matrix: String, detail: String },

    /// A matrix flagged unitary or hermitian failed its construction check.
    #[error("{kind} invariant violated for {matrix}: defect {defect:.3e} > tol {tol:.3e}")]
    MatrixInvariant {
        kind: &'static str,
        matrix: String,
        defect: f64,
        tol: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid vertex {0} for simplex with M={1}")]
    InvalidVertex(String, usize),

    /// The polynomial propagator could not certify the requested accuracy.
    #[error("propagator could not meet tolerance {requested:.3e}; achieved error estimate {achieved:.3e}")]
    ToleranceNotMet { requested: f64, achieved: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
