//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by signal construction, transform evaluation and ridge
/// extraction.
#[derive(Debug, Error)]
pub enum CwltError {
    /// Invalid user-facing argument (bad flag value, unknown name, out-of-range
    /// parameter). Maps to exit code 2 in the CLI.
    #[error("usage: {0}")]
    Usage(String),

    /// A numeric precondition failed (non-finite evaluation, empty input,
    /// undefined quantity). Maps to exit code 1 in the CLI.
    #[error("domain: {0}")]
    Domain(String),

    /// Adjacent instantaneous frequencies touch or cross, so the window
    /// selection rules are undefined at that time.
    #[error("crossover: components {lower} and {upper} have equal IF at t = {t}")]
    Crossover { lower: usize, upper: usize, t: f64 },

    /// The chirp-model separability discriminant went negative for a pair of
    /// adjacent components: no window width can separate their zones.
    #[error("not separable: components {lower} and {upper} at t = {t} (discriminant {discriminant})")]
    NotSeparable {
        lower: usize,
        upper: usize,
        t: f64,
        discriminant: f64,
    },

    /// Ridge extraction could not find any above-threshold energy.
    #[error("extraction: {0}")]
    Extraction(String),

    /// File or serialization failure.
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for CwltError {
    fn from(e: std::io::Error) -> Self {
        CwltError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CwltError {
    fn from(e: serde_json::Error) -> Self {
        CwltError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CwltError>;
