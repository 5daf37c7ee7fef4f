//! Error taxonomy shared by the library and the CLI exit-code contract.

use thiserror::Error;

/// Library-wide error type.
///
/// The variants map onto the CLI exit codes: `Domain` → 2, `Numerical` → 3,
/// `Statistical` → 4 (usage errors are produced by the CLI itself).
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside its mathematical domain (e.g. Re δ ≤ −1/2).
    #[error("parameter domain violation: {0}")]
    Domain(String),

    /// A numerical procedure failed to meet its tolerance (root refinement,
    /// quadrature refinement, lock-in, horizon bounds, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A statistical acceptance test failed its declared threshold.
    #[error("statistical failure: {0}")]
    Statistical(String),

    /// Operation called on a representation it does not support
    /// (e.g. transfer-matrix secular evaluation on a non-step path).
    #[error("unsupported representation: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
    pub fn statistical(msg: impl Into<String>) -> Self {
        Error::Statistical(msg.into())
    }
    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    /// Exit code for the CLI taxonomy (0 pass, 1 usage, 2 domain,
    /// 3 numerical, 4 statistical).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 2,
            Error::Numerical(_) | Error::Unsupported(_) => 3,
            Error::Statistical(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
