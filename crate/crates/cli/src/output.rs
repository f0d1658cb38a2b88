//! Files are written to a temporary sibling and renamed into place, so a failed
//! run never leaves a truncated output behind.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Stages every file first; nothing is renamed until all contents are on disk.
pub fn write_all_atomic(files: &[(PathBuf, String)]) -> CliResult<()> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, contents) in files {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = NamedTempFile::new_in(dir).map_err(io_err(path))?;
        tmp.write_all(contents.as_bytes()).map_err(io_err(path))?;
        tmp.as_file().sync_all().map_err(io_err(path))?;
        staged.push((tmp, path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).map_err(|e| CliError::Io {
            path: path.clone(),
            source: e.error,
        })?;
    }
    Ok(())
}

pub fn write_atomic(path: &Path, contents: String) -> CliResult<()> {
    write_all_atomic(&[(path.to_path_buf(), contents)])
}

pub fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(io_err(path))
}
