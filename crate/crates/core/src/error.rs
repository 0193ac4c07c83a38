use thiserror::Error;

/// Errors surfaced by the numerical and combinatorial routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Evaluation point lies on (or too close to) a spectral support.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at a pole of the requested transform.
    #[error("pole at {0}")]
    Pole(String),

    /// No root of the defining equation passes the branch-selection rule.
    #[error("branch selection failed: {0}")]
    BranchSelection(String),

    /// Zero or several roots satisfy a side condition that should pin one.
    #[error("root selection failed: {0}")]
    RootSelection(String),

    /// A structural precondition is violated (e.g. non-square geometry).
    #[error("constraint violated: {0}")]
    Constraint(String),

    /// Scalar argument outside its admissible range.
    #[error("argument out of range: {0}")]
    Range(String),

    /// Enumeration size cap exceeded.
    #[error("size limit exceeded: {0}")]
    Size(String),

    /// A dense linear-algebra factorization failed.
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// Invalid contour placement for the double contour integral.
    #[error("invalid contour: {0}")]
    Contour(String),
}

pub type Result<T> = std::result::Result<T, Error>;
