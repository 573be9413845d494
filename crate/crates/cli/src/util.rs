//! Error classification and small shared helpers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::anyhow;
use sha2::{Digest, Sha256};

/// Failures split by who must act: `Config` means the invocation or a
/// config file is wrong (exit code 2); `Runtime` means the work itself
/// failed (exit code 1).
#[derive(Debug)]
pub enum CliError {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

pub type CliResult<T> = Result<T, CliError>;

/// Shorthand for classifying foreign errors.
pub trait Classify<T> {
    fn or_config(self) -> CliResult<T>;
    fn or_runtime(self) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn or_config(self) -> CliResult<T> {
        self.map_err(|e| CliError::Config(e.into()))
    }

    fn or_runtime(self) -> CliResult<T> {
        self.map_err(|e| CliError::Runtime(e.into()))
    }
}

pub fn config_error(msg: impl std::fmt::Display) -> CliError {
    CliError::Config(anyhow!("{msg}"))
}

pub fn runtime_error(msg: impl std::fmt::Display) -> CliError {
    CliError::Runtime(anyhow!("{msg}"))
}

/// Fingerprint of a dataset: SHA-256 over its manifest bytes.  The
/// manifest carries seeds, splits and per-recording counts, so two
/// datasets share a hash exactly when they are the same data.
pub fn dataset_hash(dataset_dir: &Path) -> CliResult<String> {
    let manifest = dataset_dir.join(multipath_sim::METADATA_FILE);
    let bytes = fs::read(&manifest)
        .map_err(|e| runtime_error(format!("cannot read {}: {e}", manifest.display())))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

/// Write a text file, creating parent directories as needed.
pub fn write_text(path: &Path, content: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| runtime_error(format!("cannot create {}: {e}", parent.display())))?;
    }
    fs::write(path, content)
        .map_err(|e| runtime_error(format!("cannot write {}: {e}", path.display())))
}

/// Render rows as a left-aligned table with two spaces between columns.
/// The first row is the header.
pub fn aligned_table(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0usize; columns];
    for row in rows {
        for (c, cell) in row.iter().enumerate() {
            widths[c] = widths[c].max(cell.len());
        }
    }
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c + 1 == row.len() {
                let _ = write!(line, "{cell}");
            } else {
                let _ = write!(line, "{cell:<width$}  ", width = widths[c]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}
