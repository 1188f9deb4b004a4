use std::fmt;
use std::path::PathBuf;

use lingam_core::Error as CoreError;

/// Operational failures. Statistical abstention is never an error.
#[derive(Debug)]
pub enum CliError {
    /// Bad flag values or preconditions (exit 1).
    Validation(String),
    /// Unreadable or non-numeric input (exit 2).
    MalformedCsv(String),
    /// Fewer data rows than the detector needs (exit 3).
    TooFewRows { given: usize, needed: usize },
    /// A constant input column, named (exit 4).
    DegenerateColumn(String),
    /// Output could not be written (exit 5).
    Unwritable { path: PathBuf, reason: String },
    /// A benchmark cell excluded too many batches (exit 6).
    InvalidCells(Vec<String>),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::MalformedCsv(_) => 2,
            CliError::TooFewRows { .. } => 3,
            CliError::DegenerateColumn(_) => 4,
            CliError::Unwritable { .. } => 5,
            CliError::InvalidCells(_) => 6,
        }
    }

    pub fn unwritable(path: impl Into<PathBuf>, e: impl fmt::Display) -> Self {
        CliError::Unwritable {
            path: path.into(),
            reason: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "{m}"),
            CliError::MalformedCsv(m) => write!(f, "malformed CSV: {m}"),
            CliError::TooFewRows { given, needed } => {
                write!(f, "need at least {needed} data rows, got {given}")
            }
            CliError::DegenerateColumn(c) => write!(f, "column {c} is constant"),
            CliError::Unwritable { path, reason } => {
                write!(f, "cannot write {}: {reason}", path.display())
            }
            CliError::InvalidCells(cells) => write!(
                f,
                "cells with too many excluded batches: {}",
                cells.join(", ")
            ),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::DegenerateSeries(c) => CliError::DegenerateColumn(c),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
