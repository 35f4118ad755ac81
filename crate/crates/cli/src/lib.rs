//! Batch front-end for the ergoswitch library: flat-file run configurations,
//! sweep execution with CSV/JSON emission, and seeded verification suites.

pub mod config;
pub mod runner;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config key [{section}] {key}: {message}")]
    Key {
        section: String,
        key: String,
        message: String,
    },

    #[error(transparent)]
    Core(#[from] ergoswitch_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("oracle residual {residual:.3e} exceeds the 1e-8 gate")]
    OracleResidual { residual: f64 },
}

pub type CliResult<T> = Result<T, CliError>;

/// All run/verify numeric output uses 17 significant digits, '.' decimal,
/// no locale, so reruns are byte-identical.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}
