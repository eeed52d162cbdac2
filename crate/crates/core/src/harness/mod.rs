//! Run driver, sweeps, audits and result files.
//!
//! A run owns its [`ProcessState`](crate::process::ProcessState) for its
//! whole life; sweeps execute runs in parallel and only combine their
//! results after every run has finished.

pub mod audit;
pub mod config;
pub mod oracle;
pub mod output;
pub mod run;
pub mod sweep;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::pattern::{Pattern, PatternError};
use crate::process::ProcessError;

pub use audit::{audit_state, cmd_audit, AuditOutcome};
pub use config::{RunConfig, StopSpec, DEFAULT_SEED};
pub use oracle::{compare_with_oracle, engine_distribution, permutation_distribution, total_variation, OracleReport};
pub use run::{cmd_run, execute_run, write_run_files, PatternSummary, RunArtifacts, RunOptions, RunSummary};
pub use sweep::{cmd_sweep, run_sweep, GridRow, SweepResult, SweepRow};

/// Version tag written into every JSON/CSV summary.
pub const SCHEMA_VERSION: u32 = 1;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const INVARIANT: i32 = 2;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error("pattern file {path}: {source}")]
    Pattern {
        path: PathBuf,
        #[source]
        source: PatternError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("failed to encode {what}: {message}")]
    Encode { what: &'static str, message: String },
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        exit::USAGE
    }
}

/// Reads and validates a pattern file; the pattern is named after the file stem.
pub fn load_pattern_file(path: &Path) -> Result<Pattern, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Pattern::parse(name, &text).map_err(|source| HarnessError::Pattern {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_patterns(paths: &[PathBuf]) -> Result<Vec<(PathBuf, Pattern)>, HarnessError> {
    paths
        .iter()
        .map(|p| load_pattern_file(p).map(|pat| (p.clone(), pat)))
        .collect()
}
