use thiserror::Error;

/// Errors raised by the statistical routines.
///
/// `Inconclusive` is a verdict, not an error: everything here means no
/// decision could be computed at all.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate series `{0}`: zero variance")]
    DegenerateSeries(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("series `{0}` is not standardized")]
    NotStandardized(String),

    #[error("insufficient sample: {given} observations, at least {needed} required")]
    InsufficientSample { given: usize, needed: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_len(given: usize, needed: usize) -> Result<()> {
    if given < needed {
        Err(Error::InsufficientSample { given, needed })
    } else {
        Ok(())
    }
}
