//! One process per output directory, enforced with a lock file.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::util::{runtime_error, CliError, CliResult};

const LOCK_NAME: &str = ".ghostseg-lock";

/// Held for the lifetime of a command that owns an output directory.
/// Dropping it releases the lock.
pub struct DirLock {
    path: PathBuf,
}

impl DirLock {
    pub fn acquire(dir: &Path) -> CliResult<DirLock> {
        fs::create_dir_all(dir)
            .map_err(|e| runtime_error(format!("cannot create {}: {e}", dir.display())))?;
        let path = dir.join(LOCK_NAME);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut file) => {
                let _ = writeln!(file, "pid {}", std::process::id());
                Ok(DirLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(CliError::Runtime(anyhow::anyhow!(
                    "output directory {} is in use by another run \
                     (delete {} if that run is gone)",
                    dir.display(),
                    path.display()
                )))
            }
            Err(e) => Err(runtime_error(format!("cannot lock {}: {e}", dir.display()))),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
