//! File writers for run results.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::harness::HarnessError;
use crate::process::ProcessState;
use crate::trajectory::{checkpoint_record, Checkpoint, CHECKPOINT_COLUMNS};

pub const CHECKPOINTS_FILE: &str = "checkpoints.csv";
pub const EDGE_LOG_FILE: &str = "edges.log";
pub const SUMMARY_FILE: &str = "summary.json";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const SWEEP_GRID_FILE: &str = "sweep_grid.csv";

pub fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    // creating a directory can succeed on a read-only parent mount; probe it
    let probe = dir.join(".write-probe");
    File::create(&probe).map_err(|e| HarnessError::io(dir, e))?;
    let _ = fs::remove_file(probe);
    Ok(())
}

pub fn write_checkpoints(path: &Path, checkpoints: &[Checkpoint]) -> Result<(), HarnessError> {
    let io_err = |e: csv::Error| HarnessError::io(path, e.into());
    let mut writer = csv::Writer::from_path(path).map_err(io_err)?;
    writer.write_record(CHECKPOINT_COLUMNS).map_err(io_err)?;
    for c in checkpoints {
        writer.write_record(checkpoint_record(c)).map_err(io_err)?;
    }
    writer.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn write_edge_log(path: &Path, state: &ProcessState) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = BufWriter::new(file);
    state
        .write_edge_log(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| HarnessError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Encode {
        what: "json",
        message: e.to_string(),
    })?;
    fs::write(path, text + "\n").map_err(|e| HarnessError::io(path, e))
}

/// Writes rows of already-formatted fields under `header`.
pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), HarnessError> {
    let io_err = |e: csv::Error| HarnessError::io(path, e.into());
    let mut writer = csv::Writer::from_path(path).map_err(io_err)?;
    writer.write_record(header).map_err(io_err)?;
    for row in rows {
        writer.write_record(row).map_err(io_err)?;
    }
    writer.flush().map_err(|e| HarnessError::io(path, e))
}
