//! Crate-wide error type.

use num_complex::Complex64;

/// Errors produced by construction, analysis, and I/O routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Incompatible or invalid matrix/vector dimensions.
    #[error("dimension error: {0}")]
    Dim(String),

    /// A configured size cap would be exceeded.
    #[error("size cap exceeded: {0}")]
    Size(String),

    /// Arguments outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numeric routine failed to produce a usable result.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The eigensolver stalled; the eigenvalues found so far are attached.
    #[error("eigensolver did not converge within {budget} iterations per eigenvalue ({found} of {dim} eigenvalues found)")]
    EigenNonConvergence {
        budget: usize,
        found: usize,
        dim: usize,
        partial: Vec<Complex64>,
    },

    /// A series evaluation cannot converge (essential spectral radius ≥ 1).
    #[error("series diverges: {0}")]
    Divergence(String),

    /// A matrix failed the consensus validation checks.
    #[error("validation failed: {0}")]
    Invalid(String),

    /// Malformed textual input (matrix files, generator specs, ...).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
