//! Front end for the `qillum` binary: curve sweeps, exponent tables, oracle
//! runs and the self-validation suite.

pub mod cache;
pub mod config;
pub mod curves;
pub mod error;
pub mod exponents;
pub mod output;
pub mod plot;
pub mod validate;

pub use config::{Curve, Format, RunConfig};
pub use error::{CliError, Result};

/// Process exit status for success.
pub const EXIT_OK: i32 = 0;
/// Process exit status when a validation check fails.
pub const EXIT_VALIDATION_FAILED: i32 = 1;
/// Process exit status for any error.
pub const EXIT_ERROR: i32 = 2;
