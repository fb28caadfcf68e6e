use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

/// Writes through a temporary file in the destination directory and renames
/// it into place, so a failed run leaves no partial output.
pub fn write_atomic<F>(path: &Path, body: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> lattice_sampler::error::Result<()>,
{
    let io_err = |source| CliError::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !dir.exists() {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    let tmp = NamedTempFile::new_in(dir).map_err(io_err)?;
    let mut w = BufWriter::new(tmp);
    body(&mut w)?;
    w.flush().map_err(io_err)?;
    let tmp = w.into_inner().map_err(|e| io_err(e.into_error()))?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_body_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        let r = write_atomic(&p, |w| {
            writeln!(w, "partial")?;
            Err(lattice_sampler::error::Error::Internal("boom".into()))
        });
        assert!(r.is_err());
        assert!(!p.exists());
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
        write_atomic(&p, |w| Ok(writeln!(w, "ok")?)).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "ok\n");
    }
}
