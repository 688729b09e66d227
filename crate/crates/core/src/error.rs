use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum CckpError {
    /// An invalid parameter or an unsatisfiable combination of settings.
    #[error("configuration error: {0}")]
    Config(String),

    /// A value that breaks a data-model invariant (non-positive profit, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Malformed input text.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A tail bound was requested outside the region where it is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request is valid but too large for the chosen method.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Statistical routine called with unusable input.
    #[error("statistics error: {0}")]
    Stats(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, CckpError>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(CckpError::Config(msg.into()))
}

/// Shortest decimal that parses back to `x`, switching to exponent form for
/// very small or very large magnitudes.
pub(crate) fn format_real(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}
