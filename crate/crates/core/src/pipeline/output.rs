//! Atomic artifact writes, content digests and the output-directory lock.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::PipelineError;

pub const LOCK_FILE: &str = ".chronograph.lock";

/// Writes artifacts under a root directory and records their digests.
///
/// Each file is written to a temporary sibling and renamed into place, so a
/// final name never holds a partial artifact.
#[derive(Debug)]
pub struct Outputs {
    root: PathBuf,
    written: BTreeMap<String, String>,
}

impl Outputs {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self {
            root: root.into(),
            written: BTreeMap::new(),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Writes `path` (relative to the root, or absolute) through `fill`.
    pub fn write<F, E>(&mut self, path: impl AsRef<Path>, fill: F) -> Result<PathBuf, PipelineError>
    where
        F: FnOnce(&mut dyn Write) -> Result<(), E>,
        E: std::fmt::Display,
    {
        let path = self.root.join(path.as_ref());
        let digest = write_atomic(&path, fill)?;
        let key = path
            .strip_prefix(&self.root)
            .unwrap_or(&path)
            .to_string_lossy()
            .replace('\\', "/");
        self.written.insert(key, digest);
        Ok(path)
    }

    /// Records digests of files written by a helper that did its own
    /// atomic writes.
    pub fn record(&mut self, key: String, digest: String) {
        self.written.insert(key, digest);
    }

    /// Artifact path relative to the root, mapped to its SHA-256.
    pub fn digests(&self) -> &BTreeMap<String, String> {
        &self.written
    }
}

/// Hashing writer so the digest is computed while the bytes are written.
struct HashingWriter<W: Write> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

/// Writes a file atomically and returns the hex SHA-256 of its content.
pub fn write_atomic<F, E>(path: &Path, fill: F) -> Result<String, PipelineError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), E>,
    E: std::fmt::Display,
{
    let io = |e: std::io::Error| PipelineError::io(path, e);
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let tmp = tempfile::Builder::new()
        .prefix(".tmp-")
        .tempfile_in(dir)
        .map_err(io)?;
    let mut w = HashingWriter {
        inner: BufWriter::new(tmp),
        hasher: Sha256::new(),
    };
    fill(&mut w).map_err(|e| PipelineError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    w.flush().map_err(io)?;
    let digest = hex::encode(w.hasher.finalize());
    let tmp = w.inner.into_inner().map_err(|e| io(e.into_error()))?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(digest)
}

/// Hex SHA-256 of a file.
pub fn file_digest(path: &Path) -> Result<String, PipelineError> {
    let mut f = File::open(path).map_err(|e| PipelineError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf).map_err(|e| PipelineError::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Digest over every regular file of a directory, by sorted name.
pub fn dir_digest(dir: &Path) -> Result<String, PipelineError> {
    let mut names: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| PipelineError::io(dir, e))?
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_ok_and(|t| t.is_file()))
        .map(|e| e.file_name())
        .collect();
    names.sort();
    let mut hasher = Sha256::new();
    for name in names {
        let digest = file_digest(&dir.join(&name))?;
        hasher.update(name.to_string_lossy().as_bytes());
        hasher.update([0]);
        hasher.update(digest.as_bytes());
        hasher.update(b"\n");
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Exclusive claim on an output directory, released on drop.
#[derive(Debug)]
pub struct DirLock {
    path: PathBuf,
}

impl DirLock {
    /// Creates the lock file. A lock left by a process that no longer
    /// exists is taken over.
    pub fn acquire(dir: &Path) -> Result<Self, PipelineError> {
        std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
        let path = dir.join(LOCK_FILE);
        for _ in 0..2 {
            match File::options().write(true).create_new(true).open(&path) {
                Ok(mut f) => {
                    let _ = writeln!(f, "{}", std::process::id());
                    return Ok(Self { path });
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    if !is_stale(&path) {
                        return Err(PipelineError::Locked(path));
                    }
                    log::warn!("removing stale lock {}", path.display());
                    let _ = std::fs::remove_file(&path);
                }
                Err(e) => return Err(PipelineError::io(&path, e)),
            }
        }
        Err(PipelineError::Locked(path))
    }
}

fn is_stale(path: &Path) -> bool {
    let Ok(text) = std::fs::read_to_string(path) else {
        return false;
    };
    match text.trim().parse::<u32>() {
        Ok(pid) if Path::new("/proc").is_dir() => !Path::new(&format!("/proc/{pid}")).exists(),
        _ => false,
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_leaves_no_partial_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.txt");
        let err = write_atomic(&path, |w| {
            w.write_all(b"partial").map_err(|e| e.to_string())?;
            Err::<(), _>("boom".to_string())
        });
        assert!(err.is_err());
        assert!(!path.exists());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
        let digest = write_atomic(&path, |w| w.write_all(b"abc")).unwrap();
        assert_eq!(digest, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_eq!(file_digest(&path).unwrap(), digest);
    }

    #[test]
    fn lock_is_exclusive_and_released() {
        let dir = tempfile::tempdir().unwrap();
        let lock = DirLock::acquire(dir.path()).unwrap();
        assert!(matches!(DirLock::acquire(dir.path()), Err(PipelineError::Locked(_))));
        drop(lock);
        assert!(DirLock::acquire(dir.path()).is_ok());
    }

    #[test]
    fn stale_lock_is_taken_over() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join(LOCK_FILE), "4294967294\n").unwrap();
        assert!(DirLock::acquire(dir.path()).is_ok());
    }
}
