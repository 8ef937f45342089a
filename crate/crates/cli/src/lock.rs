//! Advisory lock for a store directory.
//!
//! A save replaces the store directory wholesale, so the lock file lives
//! beside it (`<dir>.lock`) rather than inside, where it would be swapped
//! away with the old snapshot.

use std::fs::{File, OpenOptions};
use std::io;
use std::os::unix::io::AsRawFd;
use std::path::{Path, PathBuf};

pub enum Mode {
    Shared,
    Exclusive,
}

/// Held until dropped; closing the file releases the lock.
pub struct StoreLock {
    _file: File,
}

pub fn lock_path(dir: &Path) -> PathBuf {
    let mut name = dir.file_name().map(|n| n.to_os_string()).unwrap_or_else(|| ".".into());
    name.push(".lock");
    dir.with_file_name(name)
}

impl StoreLock {
    /// Blocks until the lock is granted.
    pub fn acquire(dir: &Path, mode: Mode) -> io::Result<Self> {
        let path = lock_path(dir);
        let file = OpenOptions::new().create(true).truncate(false).write(true).open(&path)?;
        let op = match mode {
            Mode::Shared => libc::LOCK_SH,
            Mode::Exclusive => libc::LOCK_EX,
        };
        loop {
            // SAFETY: the descriptor is owned by `file` and open for the call.
            if unsafe { libc::flock(file.as_raw_fd(), op) } == 0 {
                return Ok(Self { _file: file });
            }
            let err = io::Error::last_os_error();
            if err.kind() != io::ErrorKind::Interrupted {
                return Err(err);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lock_file_sits_beside_store() {
        assert_eq!(lock_path(Path::new("/tmp/x/store")), PathBuf::from("/tmp/x/store.lock"));
        assert_eq!(lock_path(Path::new("store/")), PathBuf::from("store.lock"));
    }

    #[test]
    fn shared_locks_coexist() {
        let dir = tempfile::tempdir().unwrap();
        let store = dir.path().join("s");
        let a = StoreLock::acquire(&store, Mode::Shared).unwrap();
        let b = StoreLock::acquire(&store, Mode::Shared).unwrap();
        drop((a, b));
        StoreLock::acquire(&store, Mode::Exclusive).unwrap();
    }
}
