use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use tempfile::TempDir;

use crate::error::{CliError, Stage};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects artifacts in a hidden directory next to their destination and
/// moves them into place only on `commit`. Dropping an uncommitted staging
/// area deletes everything written so far.
pub struct Staging {
    dir: TempDir,
    out: PathBuf,
    digests: BTreeMap<String, String>,
}

impl Staging {
    pub fn new(out: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(out).map_err(|e| CliError::io(Stage::Output, out, e))?;
        let dir = tempfile::Builder::new()
            .prefix(".staging-")
            .tempdir_in(out)
            .map_err(|e| CliError::io(Stage::Output, out, e))?;
        Ok(Staging {
            dir,
            out: out.to_path_buf(),
            digests: BTreeMap::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
        let bytes = contents.as_ref();
        let path = self.dir.path().join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(Stage::Output, &path, e))?;
        self.digests.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    /// SHA-256 of every artifact written so far, keyed by file name.
    pub fn digests(&self) -> &BTreeMap<String, String> {
        &self.digests
    }

    pub fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        let mut written = Vec::with_capacity(self.digests.len());
        for name in self.digests.keys() {
            let (from, to) = (self.dir.path().join(name), self.out.join(name));
            fs::rename(&from, &to).map_err(|e| CliError::io(Stage::Output, &to, e))?;
            written.push(to);
        }
        Ok(written)
    }
}

/// Writes one file through a temporary sibling and an atomic rename.
pub fn write_atomic(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    use std::io::Write;

    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(|e| CliError::io(Stage::Output, &dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::io(Stage::Output, &dir, e))?;
    tmp.write_all(contents.as_ref())
        .map_err(|e| CliError::io(Stage::Output, path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(Stage::Output, path, e.error))?;
    Ok(())
}
