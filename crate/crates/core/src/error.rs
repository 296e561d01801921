use thiserror::Error;

/// Failure categories shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical or numerical parameter lies outside its admissible range.
    #[error("parameter out of domain: {0}")]
    Domain(String),
    /// A caller handed in an object that breaks a structural contract
    /// (non-symplectic map, mismatched dimensions, bad mode index).
    #[error("contract violation: {0}")]
    Contract(String),
    /// The Fock-space truncation is too small for the requested accuracy.
    #[error("truncation insufficient on mode {mode} at dim {dim}: {detail}")]
    Truncation {
        mode: usize,
        dim: usize,
        detail: String,
    },
    /// A numerical routine produced a value that fails a health check.
    #[error("numerical health check failed: {0}")]
    Numerical(String),
    /// The requested combination of options is not supported.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Stable machine-readable code for the category.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Contract(_) => "contract",
            Error::Truncation { .. } => "truncation",
            Error::Numerical(_) => "numerical",
            Error::Unsupported(_) => "unsupported",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
