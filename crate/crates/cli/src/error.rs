use std::path::PathBuf;

use thiserror::Error;

/// Everything the command line can fail with, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge {u} {v} (pass --multigraph to allow)")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("negative entry {value} at row {row}, column {col}")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("matrix is not square: row {row} has {found} entries, expected {expected}")]
    NotSquare {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("no certificate: {0}")]
    NoCertificate(String),
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
    #[error(transparent)]
    Core(#[from] spinmix_core::Error),
}

impl CliError {
    /// 0 success, 1 usage, 2 parse, 3 no certificate or infeasible.
    pub fn exit_code(&self) -> i32 {
        use spinmix_core::Error as E;
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. }
            | CliError::Parse { .. }
            | CliError::SelfLoop { .. }
            | CliError::DuplicateEdge { .. }
            | CliError::NegativeEntry { .. }
            | CliError::NotSquare { .. } => 2,
            CliError::NoCertificate(_) | CliError::ChecksFailed { .. } => 3,
            CliError::Core(e) => match e {
                E::NoCertificate(_) | E::DeltaTooSmall { .. } | E::KappaExceedsHalfAlpha { .. } => 3,
                _ => 1,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
