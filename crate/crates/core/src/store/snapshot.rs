//! Textual snapshot directory.
//!
//! ```text
//! MANIFEST  format-version=1 / version-count=<k> / vng-counter=<n> / label <ordinal> <text>
//! DICT      <id>\t<term in N-Triples syntax>
//! VNG       <counter>\t<graph-term-id>\t<ordinal>
//! ENTRIES   <graph-id>\t<s-id>\t<p-id>\t<o-id>\t<bitstring, version 1 leftmost>
//! META      user metadata triples in N-Triples
//! CHECKSUM  <file> <sha256 hex>
//! ```
//!
//! A save writes a complete sibling directory and swaps it into place, so a
//! crash mid-save leaves the previous snapshot intact.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{check_user_metadata, CondensedEntry, Store, StoreError, VersionBitmap, VngEntry};
use crate::dictionary::{Dictionary, TermId};
use crate::nquads;
use crate::vocab::VersionOrdinal;

pub const FORMAT_VERSION: u32 = 1;
pub const CHECKSUM_ALGORITHM: &str = "sha256";

const DATA_FILES: [&str; 5] = ["MANIFEST", "DICT", "VNG", "ENTRIES", "META"];

impl Store {
    pub fn save_snapshot(&self, dir: &Path) -> Result<(), StoreError> {
        let files = self.render_snapshot();
        let dir = &if dir.exists() { fs::canonicalize(dir).map_err(io_err(dir))? } else { dir.to_path_buf() };
        let staging = sibling(dir, "staging")?;
        if staging.exists() {
            fs::remove_dir_all(&staging).map_err(io_err(&staging))?;
        }
        fs::create_dir_all(&staging).map_err(io_err(&staging))?;
        for (name, content) in &files {
            let path = staging.join(name);
            write_synced(&path, content.as_bytes()).map_err(io_err(&path))?;
        }
        sync_dir(&staging).map_err(io_err(&staging))?;
        install(&staging, dir)
    }

    /// File name → content for every snapshot file, CHECKSUM last.
    pub fn render_snapshot(&self) -> Vec<(&'static str, String)> {
        let mut manifest = format!(
            "format-version={FORMAT_VERSION}\nversion-count={}\nvng-counter={}\n",
            self.version_count, self.vng_counter
        );
        for (v, label) in &self.labels {
            let _ = writeln!(manifest, "label {v} {label}");
        }
        let mut dict = String::new();
        for (id, term) in self.dict.iter() {
            let _ = writeln!(dict, "{id}\t{term}");
        }
        let mut vng = String::new();
        for v in &self.vngs {
            let _ = writeln!(vng, "{}\t{}\t{}", v.counter, v.graph, v.version);
        }
        let mut entries = String::new();
        let width = self.version_count as usize;
        for e in &self.entries {
            let _ = writeln!(
                entries,
                "{}\t{}\t{}\t{}\t{}",
                e.graph,
                e.subject,
                e.predicate,
                e.object,
                e.versions.render(width)
            );
        }
        let mut meta = String::new();
        for t in self.user_metadata.iter() {
            let _ = writeln!(meta, "{t}");
        }
        let mut files = vec![
            ("MANIFEST", manifest),
            ("DICT", dict),
            ("VNG", vng),
            ("ENTRIES", entries),
            ("META", meta),
        ];
        let mut checksum = String::new();
        for (name, content) in &files {
            let _ = writeln!(checksum, "{name} {}", digest(content.as_bytes()));
        }
        files.push(("CHECKSUM", checksum));
        files
    }

    pub fn load_snapshot(dir: &Path) -> Result<Store, StoreError> {
        let manifest_path = dir.join("MANIFEST");
        if !manifest_path.is_file() {
            return Err(corrupt("MANIFEST", format!("{} is not a snapshot directory", dir.display())));
        }
        let manifest = read(dir, "MANIFEST")?;
        let format = manifest
            .lines()
            .find_map(|l| l.strip_prefix("format-version="))
            .ok_or_else(|| corrupt("MANIFEST", "missing format-version"))?;
        if format != FORMAT_VERSION.to_string() {
            return Err(StoreError::VersionMismatch {
                found: format.to_owned(),
                expected: FORMAT_VERSION,
            });
        }
        verify_checksums(dir)?;
        let parsed = ParsedManifest::parse(&manifest)?;

        let mut terms = Vec::new();
        for (i, line) in lines(&read(dir, "DICT")?) {
            let (id, text) = line.split_once('\t').ok_or_else(|| bad_line("DICT", i, "expected <id>\\t<term>"))?;
            if id != terms.len().to_string() {
                return Err(bad_line("DICT", i, "ids must be dense and in order"));
            }
            let term = nquads::parse_term(text).map_err(|e| bad_line("DICT", i, &e.to_string()))?;
            terms.push(term);
        }
        let dict = Dictionary::from_terms(terms).map_err(|t| corrupt("DICT", format!("duplicate term {t}")))?;

        let mut store = Store {
            dict,
            version_count: parsed.version_count,
            vng_counter: parsed.vng_counter,
            labels: parsed.labels,
            ..Store::default()
        };
        let id = |file: &'static str, i: usize, text: &str, dict: &Dictionary| -> Result<TermId, StoreError> {
            text.parse::<u64>()
                .ok()
                .map(TermId)
                .filter(|id| id.index() < dict.len())
                .ok_or_else(|| bad_line(file, i, &format!("unknown term id `{text}`")))
        };
        let ordinal = |file: &'static str, i: usize, text: &str, count: u32| -> Result<VersionOrdinal, StoreError> {
            text.parse::<u32>()
                .ok()
                .filter(|&n| n <= count)
                .and_then(VersionOrdinal::new)
                .ok_or_else(|| bad_line(file, i, &format!("invalid version ordinal `{text}`")))
        };

        for (i, line) in lines(&read(dir, "VNG")?) {
            let f: Vec<&str> = line.split('\t').collect();
            let [counter, graph, version] = f[..] else {
                return Err(bad_line("VNG", i, "expected 3 fields"));
            };
            let counter: u64 = counter
                .parse()
                .ok()
                .filter(|&c| c > 0 && c <= store.vng_counter)
                .ok_or_else(|| bad_line("VNG", i, "invalid vng counter"))?;
            let graph = id("VNG", i, graph, &store.dict)?;
            if !store.dict.decode(graph)?.is_iri() {
                return Err(bad_line("VNG", i, "graph term is not an IRI"));
            }
            let version = ordinal("VNG", i, version, store.version_count)?;
            if store.vng_by_counter.contains_key(&counter) || store.vng_index(graph, version).is_some() {
                return Err(bad_line("VNG", i, "duplicate vng"));
            }
            store.push_vng(VngEntry { counter, graph, version });
        }

        for (i, line) in lines(&read(dir, "ENTRIES")?) {
            let f: Vec<&str> = line.split('\t').collect();
            let [g, s, p, o, bits] = f[..] else {
                return Err(bad_line("ENTRIES", i, "expected 5 fields"));
            };
            let key = [
                id("ENTRIES", i, g, &store.dict)?,
                id("ENTRIES", i, s, &store.dict)?,
                id("ENTRIES", i, p, &store.dict)?,
                id("ENTRIES", i, o, &store.dict)?,
            ];
            if bits.len() != store.version_count as usize {
                return Err(bad_line("ENTRIES", i, "bitstring length differs from version-count"));
            }
            let versions = VersionBitmap::parse(bits).ok_or_else(|| bad_line("ENTRIES", i, "invalid bitstring"))?;
            if versions.is_empty() {
                return Err(bad_line("ENTRIES", i, "entry with no version"));
            }
            if versions.iter().any(|v| store.vng_index(key[0], v).is_none()) {
                return Err(bad_line("ENTRIES", i, "set bit without a matching vng"));
            }
            if store.by_key.contains_key(&key) {
                return Err(bad_line("ENTRIES", i, "duplicate entry"));
            }
            store.push_entry(CondensedEntry {
                graph: key[0],
                subject: key[1],
                predicate: key[2],
                object: key[3],
                versions,
            });
        }

        for (i, line) in lines(&read(dir, "META")?) {
            let triple = nquads::parse_ntriples_line(line)
                .map_err(|e| bad_line("META", i, &e.to_string()))?
                .ok_or_else(|| bad_line("META", i, "expected a triple"))?;
            check_user_metadata(&triple).map_err(|e| bad_line("META", i, &e.to_string()))?;
            store.user_metadata.insert(triple);
        }
        Ok(store)
    }
}

struct ParsedManifest {
    version_count: u32,
    vng_counter: u64,
    labels: std::collections::BTreeMap<VersionOrdinal, String>,
}

impl ParsedManifest {
    fn parse(text: &str) -> Result<Self, StoreError> {
        let mut version_count = None;
        let mut vng_counter = None;
        let mut labels = std::collections::BTreeMap::new();
        for (i, line) in lines(text) {
            if let Some(v) = line.strip_prefix("version-count=") {
                version_count = Some(v.parse::<u32>().map_err(|_| bad_line("MANIFEST", i, "invalid version-count"))?);
            } else if let Some(v) = line.strip_prefix("vng-counter=") {
                vng_counter = Some(v.parse::<u64>().map_err(|_| bad_line("MANIFEST", i, "invalid vng-counter"))?);
            } else if let Some(rest) = line.strip_prefix("label ") {
                let (ord, label) = rest.split_once(' ').unwrap_or((rest, ""));
                let ord = ord
                    .parse::<u32>()
                    .ok()
                    .and_then(VersionOrdinal::new)
                    .ok_or_else(|| bad_line("MANIFEST", i, "invalid label ordinal"))?;
                labels.insert(ord, label.to_owned());
            } else if !line.starts_with("format-version=") {
                return Err(bad_line("MANIFEST", i, "unrecognised line"));
            }
        }
        let version_count = version_count.ok_or_else(|| corrupt("MANIFEST", "missing version-count"))?;
        if labels.keys().any(|v| v.get() > version_count) {
            return Err(corrupt("MANIFEST", "label for a version that does not exist"));
        }
        Ok(Self {
            version_count,
            vng_counter: vng_counter.ok_or_else(|| corrupt("MANIFEST", "missing vng-counter"))?,
            labels,
        })
    }
}

fn verify_checksums(dir: &Path) -> Result<(), StoreError> {
    let listing = read(dir, "CHECKSUM")?;
    let mut listed = HashSet::new();
    for (i, line) in lines(&listing) {
        let (name, hex) = line
            .split_once(' ')
            .ok_or_else(|| bad_line("CHECKSUM", i, "expected <file> <digest>"))?;
        if !DATA_FILES.contains(&name) || !listed.insert(name.to_owned()) {
            return Err(bad_line("CHECKSUM", i, &format!("unexpected entry `{name}`")));
        }
        let path = dir.join(name);
        let bytes = fs::read(&path).map_err(io_err(&path))?;
        if digest(&bytes) != hex {
            return Err(corrupt(name, "checksum mismatch"));
        }
    }
    if let Some(missing) = DATA_FILES.iter().find(|f| !listed.contains(**f)) {
        return Err(corrupt("CHECKSUM", format!("no digest for {missing}")));
    }
    Ok(())
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(dir: &Path, name: &str) -> Result<String, StoreError> {
    let path = dir.join(name);
    let bytes = fs::read(&path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => corrupt(name, "missing file"),
        _ => StoreError::Io { path: path.clone(), source: e },
    })?;
    String::from_utf8(bytes).map_err(|_| corrupt(name, "not valid UTF-8"))
}

/// Non-empty lines with 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter(|(_, l)| !l.is_empty()).map(|(i, l)| (i + 1, l))
}

fn corrupt(file: &str, message: impl Into<String>) -> StoreError {
    StoreError::Corrupt {
        file: file.to_owned(),
        message: message.into(),
    }
}

fn bad_line(file: &str, line: usize, message: &str) -> StoreError {
    corrupt(file, format!("line {line}: {message}"))
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn sibling(dir: &Path, tag: &str) -> Result<PathBuf, StoreError> {
    let name = dir
        .file_name()
        .ok_or_else(|| StoreError::Io {
            path: dir.to_path_buf(),
            source: io::Error::new(io::ErrorKind::InvalidInput, "snapshot path has no final component"),
        })?
        .to_string_lossy();
    Ok(dir.with_file_name(format!(".{name}.{tag}-{}", std::process::id())))
}

fn write_synced(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let f = fs::File::create(path)?;
    io::Write::write_all(&mut &f, bytes)?;
    f.sync_all()
}

fn sync_dir(path: &Path) -> io::Result<()> {
    fs::File::open(path)?.sync_all()
}

/// Moves the fully written `staging` directory to `dir`.
fn install(staging: &Path, dir: &Path) -> Result<(), StoreError> {
    if !dir.exists() {
        fs::rename(staging, dir).map_err(io_err(dir))?;
        return Ok(());
    }
    if exchange(staging, dir).is_ok() {
        // `staging` now holds the previous snapshot
        return fs::remove_dir_all(staging).map_err(io_err(staging));
    }
    let old = sibling(dir, "old")?;
    fs::rename(dir, &old).map_err(io_err(dir))?;
    if let Err(e) = fs::rename(staging, dir) {
        let _ = fs::rename(&old, dir);
        return Err(io_err(dir)(e));
    }
    fs::remove_dir_all(&old).map_err(io_err(&old))
}

#[cfg(target_os = "linux")]
fn exchange(a: &Path, b: &Path) -> io::Result<()> {
    use std::ffi::CString;
    use std::os::unix::ffi::OsStrExt;
    let a = CString::new(a.as_os_str().as_bytes())?;
    let b = CString::new(b.as_os_str().as_bytes())?;
    // SAFETY: both pointers are valid NUL-terminated paths for the duration of the call.
    let rc = unsafe {
        libc::renameat2(
            libc::AT_FDCWD,
            a.as_ptr(),
            libc::AT_FDCWD,
            b.as_ptr(),
            libc::RENAME_EXCHANGE,
        )
    };
    if rc == 0 {
        Ok(())
    } else {
        Err(io::Error::last_os_error())
    }
}

#[cfg(not(target_os = "linux"))]
fn exchange(_a: &Path, _b: &Path) -> io::Result<()> {
    Err(io::Error::new(io::ErrorKind::Unsupported, "atomic exchange unavailable"))
}
