use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Every failure the front end can report, grouped by what the user has to
/// fix.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("truncation insufficient on mode {mode} at dim {dim}: {detail}")]
    Truncation { mode: usize, dim: usize, detail: String },
    #[error("numerical health check failed: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Domain(_) => "domain",
            CliError::Truncation { .. } => "truncation",
            CliError::Numerical(_) => "numerical",
            CliError::Io { .. } => "io",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut body = json!({ "code": self.code(), "message": self.to_string() });
        if let CliError::Truncation { mode, dim, .. } = self {
            body["mode"] = json!(mode);
            body["dim"] = json!(dim);
        }
        json!({ "error": body })
    }
}

impl From<qillum::Error> for CliError {
    fn from(e: qillum::Error) -> Self {
        match e {
            qillum::Error::Domain(m) => CliError::Domain(m),
            qillum::Error::Truncation { mode, dim, detail } => CliError::Truncation { mode, dim, detail },
            qillum::Error::Numerical(m) => CliError::Numerical(m),
            qillum::Error::Contract(m) | qillum::Error::Unsupported(m) => CliError::Config(m),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
