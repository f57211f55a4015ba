use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("numerical failure at epoch {epoch}: {reason}")]
    Numerical { epoch: usize, reason: String },

    #[error("parse error at byte {offset}: {reason}")]
    Parse { offset: usize, reason: String },

    #[error("parse error at line {line}: {reason}")]
    ParseLine { line: usize, reason: String },

    #[error("incompatible model file version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("empty group: group sizes {sizes:?}")]
    EmptyGroup { sizes: Vec<usize> },

    #[error("fit did not converge after {iterations} iterations (gradient norm {grad_norm:e})")]
    NonConvergence { iterations: usize, grad_norm: f64 },

    #[error("undefined confidence interval: {0}")]
    UndefinedCi(String),

    #[error("missing input file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("{count} explanation(s) failed: {detail}")]
    Batch { count: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
