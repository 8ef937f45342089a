//! Condensed versioned quad store.
//!
//! Each distinct `(graph, subject, predicate, object)` is stored once, with a
//! [`VersionBitmap`] recording the versions that contain it. Ingesting version
//! `m` sets bit `m` on the entries present in that version's document; entries
//! the document does not mention implicitly carry a zero at that position.

mod bitmap;
mod snapshot;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::ops::Range;
use std::path::PathBuf;

use indexmap::IndexMap;
use thiserror::Error;

pub use bitmap::VersionBitmap;
pub use snapshot::{CHECKSUM_ALGORITHM, FORMAT_VERSION};

use crate::dictionary::{Dictionary, DictionaryError, TermId};
use crate::nquads::ParsedDocument;
use crate::term::{Quad, Term, Triple};
use crate::vocab::{self, MetadataGraph, VersionOrdinal, VngRecord};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("line {line}: default-graph quad in version data; every quad needs a named graph")]
    DefaultGraphQuad { line: usize },
    #[error("version label must be a single line")]
    InvalidLabel,
    #[error("unknown versioned named graph {0}")]
    UnknownVng(String),
    #[error("metadata triple uses reserved predicate <{0}>")]
    ReservedPredicate(String),
    #[error("capacity exhausted: {0}")]
    Capacity(&'static str),
    #[error(transparent)]
    Dictionary(#[from] DictionaryError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt snapshot: {file}: {message}")]
    Corrupt { file: String, message: String },
    #[error("unsupported snapshot format-version {found} (expected {expected})")]
    VersionMismatch { found: String, expected: u32 },
}

impl StoreError {
    /// True for storage faults (I/O, corruption) as opposed to bad input.
    pub fn is_storage_fault(&self) -> bool {
        matches!(
            self,
            StoreError::Io { .. }
                | StoreError::Corrupt { .. }
                | StoreError::VersionMismatch { .. }
                | StoreError::Dictionary(DictionaryError::UnknownId(_))
        )
    }
}

/// One condensed row: a quad key plus the versions that contain it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondensedEntry {
    pub graph: TermId,
    pub subject: TermId,
    pub predicate: TermId,
    pub object: TermId,
    pub versions: VersionBitmap,
}

impl CondensedEntry {
    fn key(&self) -> [TermId; 4] {
        [self.graph, self.subject, self.predicate, self.object]
    }
}

/// Position filter for [`Store::lookup`]; `None` is a wildcard.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QuadPattern {
    pub graph: Option<TermId>,
    pub subject: Option<TermId>,
    pub predicate: Option<TermId>,
    pub object: Option<TermId>,
}

impl QuadPattern {
    fn matches(&self, e: &CondensedEntry) -> bool {
        self.graph.is_none_or(|g| g == e.graph)
            && self.subject.is_none_or(|s| s == e.subject)
            && self.predicate.is_none_or(|p| p == e.predicate)
            && self.object.is_none_or(|o| o == e.object)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct VngEntry {
    pub counter: u64,
    pub graph: TermId,
    pub version: VersionOrdinal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestReport {
    pub ordinal: VersionOrdinal,
    pub minted_vngs: Vec<VngRecord>,
    /// Distinct quads in the document.
    pub quad_count: usize,
    pub duplicate_count: usize,
    pub new_entry_count: usize,
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "version={}", self.ordinal)?;
        for rec in &self.minted_vngs {
            writeln!(f, "vng={} graph={}", rec.iri, rec.graph)?;
        }
        writeln!(f, "quads={}", self.quad_count)?;
        writeln!(f, "duplicates={}", self.duplicate_count)?;
        writeln!(f, "new-entries={}", self.new_entry_count)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub versions: u64,
    pub graphs: u64,
    pub vngs: u64,
    pub entries: u64,
    pub flat_quads: u64,
    pub metadata_triples: u64,
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "versions={}", self.versions)?;
        writeln!(f, "graphs={}", self.graphs)?;
        writeln!(f, "vngs={}", self.vngs)?;
        writeln!(f, "entries={}", self.entries)?;
        writeln!(f, "flat-quads={}", self.flat_quads)?;
        writeln!(f, "metadata-triples={}", self.metadata_triples)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Store {
    dict: Dictionary,
    entries: Vec<CondensedEntry>,
    by_key: HashMap<[TermId; 4], usize>,
    by_subject: HashMap<TermId, Vec<usize>>,
    by_graph_predicate: HashMap<(TermId, TermId), Vec<usize>>,
    by_predicate: HashMap<TermId, Vec<usize>>,
    /// Graph → versions in which a vng exists for it, in first-seen order.
    graphs: IndexMap<TermId, VersionBitmap>,
    vngs: Vec<VngEntry>,
    vng_by_counter: HashMap<u64, usize>,
    vng_by_graph_version: HashMap<(TermId, VersionOrdinal), usize>,
    user_metadata: MetadataGraph,
    version_count: u32,
    vng_counter: u64,
    labels: BTreeMap<VersionOrdinal, String>,
}

impl PartialEq for Store {
    fn eq(&self, other: &Self) -> bool {
        self.dict == other.dict
            && self.entries == other.entries
            && self.vngs == other.vngs
            && self.user_metadata == other.user_metadata
            && self.version_count == other.version_count
            && self.vng_counter == other.vng_counter
            && self.labels == other.labels
    }
}

impl Eq for Store {}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dict
    }

    pub fn version_count(&self) -> u32 {
        self.version_count
    }

    pub fn versions(&self) -> impl Iterator<Item = VersionOrdinal> {
        (1..=self.version_count).filter_map(VersionOrdinal::new)
    }

    pub fn label(&self, version: VersionOrdinal) -> Option<&str> {
        self.labels.get(&version).map(String::as_str)
    }

    pub fn entries(&self) -> &[CondensedEntry] {
        &self.entries
    }

    /// Named graphs with the versions in which they have a vng.
    pub fn graphs(&self) -> impl Iterator<Item = (TermId, &VersionBitmap)> {
        self.graphs.iter().map(|(g, b)| (*g, b))
    }

    pub fn user_metadata(&self) -> &MetadataGraph {
        &self.user_metadata
    }

    /// Ingests one document as the next version.
    ///
    /// The operation is atomic: every fallible step runs before the store is
    /// touched. Blank node labels are scoped to the version (`_:x` in version
    /// 3 becomes `_:v3.x`), so blank nodes never join across loads.
    pub fn ingest_version(&mut self, doc: &ParsedDocument, label: Option<&str>) -> Result<IngestReport, StoreError> {
        if label.is_some_and(|l| l.contains(['\n', '\r'])) {
            return Err(StoreError::InvalidLabel);
        }
        if let Some(i) = doc.quads.iter().position(|q| q.graph.is_none()) {
            return Err(StoreError::DefaultGraphQuad { line: doc.line_of(i) });
        }
        let next = self
            .version_count
            .checked_add(1)
            .and_then(VersionOrdinal::new)
            .ok_or(StoreError::Capacity("version ordinals"))?;

        // Stage: resolve every term to an existing or provisional id.
        let first_new = self.dict.next_id()?.0;
        let mut staged: IndexMap<Term, TermId> = IndexMap::new();
        let resolve = |t: Term, staged: &mut IndexMap<Term, TermId>| -> Result<TermId, StoreError> {
            if let Some(id) = self.dict.lookup(&t) {
                return Ok(id);
            }
            let n = staged.len() as u64;
            let id = first_new.checked_add(n).filter(|&id| id < u64::MAX);
            let id = TermId(id.ok_or(StoreError::Dictionary(DictionaryError::Exhausted))?);
            Ok(*staged.entry(t).or_insert(id))
        };
        let mut keys: Vec<[TermId; 4]> = Vec::with_capacity(doc.quads.len());
        let mut seen = HashSet::with_capacity(doc.quads.len());
        let mut graph_order: Vec<TermId> = Vec::new();
        let mut duplicate_count = 0;
        for q in &doc.quads {
            let graph = q.graph.clone().expect("checked above");
            let key = [
                resolve(graph, &mut staged)?,
                resolve(scope_blank(&q.subject, next), &mut staged)?,
                resolve(q.predicate.clone(), &mut staged)?,
                resolve(scope_blank(&q.object, next), &mut staged)?,
            ];
            if !seen.insert(key) {
                duplicate_count += 1;
                continue;
            }
            if !graph_order.contains(&key[0]) {
                graph_order.push(key[0]);
            }
            keys.push(key);
        }
        let counter_end = self
            .vng_counter
            .checked_add(graph_order.len() as u64)
            .ok_or(StoreError::Capacity("vng counter"))?;
        debug_assert!(counter_end >= self.vng_counter);

        // Commit: nothing below can fail.
        for (term, id) in staged {
            let got = self.dict.encode(&term).expect("capacity checked during staging");
            debug_assert_eq!(got, id);
        }
        self.version_count = next.get();
        if let Some(l) = label {
            self.labels.insert(next, l.to_owned());
        }
        let mut minted = Vec::with_capacity(graph_order.len());
        for graph in graph_order {
            self.vng_counter += 1;
            let vng = VngEntry {
                counter: self.vng_counter,
                graph,
                version: next,
            };
            self.push_vng(vng);
            minted.push(self.vng_record(&vng));
        }
        let before = self.entries.len();
        for key in &keys {
            self.set_bit(*key, next);
        }
        debug_assert!(self.dict.check_bijection());
        Ok(IngestReport {
            ordinal: next,
            minted_vngs: minted,
            quad_count: keys.len(),
            duplicate_count,
            new_entry_count: self.entries.len() - before,
        })
    }

    /// Adds user metadata triples to the default graph. The `vers:`
    /// predicates are reserved for minted vng records.
    pub fn add_metadata(&mut self, triples: impl IntoIterator<Item = Triple>) -> Result<usize, StoreError> {
        let triples: Vec<Triple> = triples.into_iter().collect();
        for t in &triples {
            check_user_metadata(t)?;
        }
        Ok(triples.into_iter().filter(|t| self.user_metadata.insert(t.clone())).count())
    }

    fn push_vng(&mut self, vng: VngEntry) {
        let idx = self.vngs.len();
        self.vngs.push(vng);
        self.vng_by_counter.insert(vng.counter, idx);
        self.vng_by_graph_version.insert((vng.graph, vng.version), idx);
        self.graphs.entry(vng.graph).or_default().insert(vng.version);
    }

    fn set_bit(&mut self, key: [TermId; 4], version: VersionOrdinal) {
        if let Some(&idx) = self.by_key.get(&key) {
            self.entries[idx].versions.insert(version);
            return;
        }
        self.push_entry(CondensedEntry {
            graph: key[0],
            subject: key[1],
            predicate: key[2],
            object: key[3],
            versions: VersionBitmap::single(version),
        });
    }

    fn push_entry(&mut self, entry: CondensedEntry) {
        let idx = self.entries.len();
        self.by_key.insert(entry.key(), idx);
        self.by_subject.entry(entry.subject).or_default().push(idx);
        self.by_graph_predicate
            .entry((entry.graph, entry.predicate))
            .or_default()
            .push(idx);
        self.by_predicate.entry(entry.predicate).or_default().push(idx);
        self.entries.push(entry);
    }

    /// Entries matching every bound position, in insertion order.
    pub fn lookup(&self, pattern: QuadPattern) -> impl Iterator<Item = &CondensedEntry> + '_ {
        fn slice(list: Option<&Vec<usize>>) -> &[usize] {
            list.map_or(&[], Vec::as_slice)
        }
        let mut lists: Vec<&[usize]> = Vec::new();
        if let Some(s) = pattern.subject {
            lists.push(slice(self.by_subject.get(&s)));
        }
        match (pattern.graph, pattern.predicate) {
            (Some(g), Some(p)) => lists.push(slice(self.by_graph_predicate.get(&(g, p)))),
            (None, Some(p)) => lists.push(slice(self.by_predicate.get(&p))),
            _ => {}
        }
        let mut best = match lists.into_iter().min_by_key(|l| l.len()) {
            Some(l) => Candidates::List(l),
            None => Candidates::All(0..self.entries.len()),
        };
        if let (Some(g), None) = (pattern.graph, pattern.predicate) {
            if !self.graphs.contains_key(&g) {
                best = Candidates::List(&[]);
            }
        }
        if let Some(o) = pattern.object {
            if o.index() >= self.dict.len() {
                best = Candidates::List(&[]);
            }
        }
        best.into_iter()
            .map(move |i| &self.entries[i])
            .filter(move |e| pattern.matches(e))
    }

    pub fn get_entry(&self, graph: TermId, subject: TermId, predicate: TermId, object: TermId) -> Option<&CondensedEntry> {
        self.by_key
            .get(&[graph, subject, predicate, object])
            .map(|&i| &self.entries[i])
    }

    pub(crate) fn vng_entries(&self) -> &[VngEntry] {
        &self.vngs
    }

    pub(crate) fn vng_index(&self, graph: TermId, version: VersionOrdinal) -> Option<usize> {
        self.vng_by_graph_version.get(&(graph, version)).copied()
    }

    pub(crate) fn vng_index_of_iri(&self, iri: &Term) -> Option<usize> {
        let counter = vocab::parse_vng_counter(iri.as_iri()?)?;
        self.vng_by_counter.get(&counter).copied()
    }

    fn vng_record(&self, vng: &VngEntry) -> VngRecord {
        VngRecord {
            iri: vocab::mint_vng_iri(vng.counter),
            graph: self.decode(vng.graph).clone(),
            version: vng.version,
        }
    }

    pub fn vng_records(&self) -> impl Iterator<Item = VngRecord> + '_ {
        self.vngs.iter().map(|v| self.vng_record(v))
    }

    /// IRI of the vng for `graph` at `version`, if that graph had rows then.
    pub fn vng_iri(&self, graph: TermId, version: VersionOrdinal) -> Option<Term> {
        let idx = self.vng_index(graph, version)?;
        Some(vocab::mint_vng_iri(self.vngs[idx].counter))
    }

    pub fn resolve_vng(&self, iri: &Term) -> Result<(TermId, VersionOrdinal), StoreError> {
        let idx = self
            .vng_index_of_iri(iri)
            .ok_or_else(|| StoreError::UnknownVng(iri.to_string()))?;
        Ok((self.vngs[idx].graph, self.vngs[idx].version))
    }

    /// Decodes an id that the store itself produced.
    pub(crate) fn decode(&self, id: TermId) -> &Term {
        self.dict.decode(id).expect("store ids are always allocated")
    }

    /// Default graph: two triples per vng, then user metadata.
    pub fn metadata(&self) -> MetadataGraph {
        self.vng_records()
            .flat_map(|r| r.metadata_triples())
            .chain(self.user_metadata.iter().cloned())
            .collect()
    }

    /// Flat model: every (entry, set version) as a quad in the vng's graph,
    /// followed by the metadata triples in the default graph.
    pub fn export_flat(&self) -> Vec<Quad> {
        let mut out = Vec::new();
        for e in &self.entries {
            for v in e.versions.iter() {
                let vng = self.vng_iri(e.graph, v).expect("set bit implies a minted vng");
                out.push(Quad {
                    subject: self.decode(e.subject).clone(),
                    predicate: self.decode(e.predicate).clone(),
                    object: self.decode(e.object).clone(),
                    graph: Some(vng),
                });
            }
        }
        out.extend(self.metadata().iter().cloned().map(Quad::from));
        out
    }

    /// Triples present in versioned graph `a` and absent from `b`, in entry order.
    pub fn diff_vng(&self, a: &Term, b: &Term) -> Result<Vec<Triple>, StoreError> {
        let (ga, va) = self.resolve_vng(a)?;
        let (gb, vb) = self.resolve_vng(b)?;
        let in_a = self.lookup(QuadPattern {
            graph: Some(ga),
            ..Default::default()
        });
        let ids: Vec<[TermId; 3]> = if ga == gb {
            in_a.filter(|e| e.versions.contains(va) && !e.versions.contains(vb))
                .map(|e| [e.subject, e.predicate, e.object])
                .collect()
        } else {
            let right: HashSet<[TermId; 3]> = self
                .lookup(QuadPattern {
                    graph: Some(gb),
                    ..Default::default()
                })
                .filter(|e| e.versions.contains(vb))
                .map(|e| [e.subject, e.predicate, e.object])
                .collect();
            in_a.filter(|e| e.versions.contains(va))
                .map(|e| [e.subject, e.predicate, e.object])
                .filter(|k| !right.contains(k))
                .collect()
        };
        Ok(ids
            .into_iter()
            .map(|[s, p, o]| Triple {
                subject: self.decode(s).clone(),
                predicate: self.decode(p).clone(),
                object: self.decode(o).clone(),
            })
            .collect())
    }

    pub fn stats(&self) -> Stats {
        Stats {
            versions: u64::from(self.version_count),
            graphs: self.graphs.len() as u64,
            vngs: self.vngs.len() as u64,
            entries: self.entries.len() as u64,
            flat_quads: self.entries.iter().map(|e| e.versions.count()).sum(),
            metadata_triples: 2 * self.vngs.len() as u64 + self.user_metadata.len() as u64,
        }
    }

    /// Condensed rows rendered as `graph s p o bitstring` lines with ids
    /// decoded, one per entry in entry order.
    pub fn dump_entries(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "{} {} {} {} {}\n",
                self.decode(e.graph),
                self.decode(e.subject),
                self.decode(e.predicate),
                self.decode(e.object),
                e.versions.render(self.version_count as usize)
            ));
        }
        out
    }
}

fn check_user_metadata(t: &Triple) -> Result<(), StoreError> {
    match t.predicate.as_iri() {
        Some(p @ (vocab::IS_VERSION_OF | vocab::IS_IN_VERSION)) => Err(StoreError::ReservedPredicate(p.to_owned())),
        _ => Ok(()),
    }
}

fn scope_blank(term: &Term, version: VersionOrdinal) -> Term {
    match term {
        Term::BlankNode(label) => Term::BlankNode(format!("v{version}.{label}")),
        other => other.clone(),
    }
}

enum Candidates<'a> {
    All(Range<usize>),
    List(&'a [usize]),
}

impl<'a> Candidates<'a> {
    fn into_iter(self) -> Box<dyn Iterator<Item = usize> + 'a> {
        match self {
            Candidates::All(r) => Box::new(r),
            Candidates::List(l) => Box::new(l.iter().copied()),
        }
    }
}

#[cfg(test)]
pub(crate) mod tests;
