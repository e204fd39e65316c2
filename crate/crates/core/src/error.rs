use thiserror::Error;

/// Error taxonomy shared by every module. The CLI maps these onto distinct
/// exit codes (validation-class errors 2, numeric 3, degeneracy 4).
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the documented domain of an operation
    /// (x outside [0,1], mode index 0, mismatched grids, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid input: non-finite coefficients, malformed
    /// configuration, inconsistent problem sizes.
    #[error("validation error: {0}")]
    Validation(String),

    /// A numerical routine failed to produce a usable result.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Simple eigenvalues (or a full-rank Gram matrix) were required but the
    /// input is degenerate.
    #[error("degeneracy error: {0}")]
    Degeneracy(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn degeneracy(msg: impl Into<String>) -> Self {
        Error::Degeneracy(msg.into())
    }
}
