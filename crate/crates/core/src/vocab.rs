//! Version identities and the metadata vocabulary.
//!
//! Every versioned named graph (vng) gets a minted IRI
//! `urn:converg:vng:{counter}` and two metadata triples in the default graph:
//!
//! ```text
//! <urn:converg:vng:3> <urn:converg:vocab:is-version-of> <graph> .
//! <urn:converg:vng:3> <urn:converg:vocab:is-in-version> <urn:converg:version:2> .
//! ```

use std::fmt;
use std::num::NonZeroU32;

use indexmap::IndexSet;

use crate::term::{Term, Triple};

pub const VNG_PREFIX: &str = "urn:converg:vng:";
pub const VERSION_PREFIX: &str = "urn:converg:version:";
pub const VOCAB_NAMESPACE: &str = "urn:converg:vocab:";
pub const IS_VERSION_OF: &str = "urn:converg:vocab:is-version-of";
pub const IS_IN_VERSION: &str = "urn:converg:vocab:is-in-version";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
pub const XSD_INT: &str = "http://www.w3.org/2001/XMLSchema#int";
pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";

const XSD_NUMERIC_LOCAL: &[&str] = &[
    "integer",
    "decimal",
    "double",
    "float",
    "int",
    "long",
    "short",
    "byte",
    "nonNegativeInteger",
    "nonPositiveInteger",
    "negativeInteger",
    "positiveInteger",
    "unsignedLong",
    "unsignedInt",
    "unsignedShort",
    "unsignedByte",
];

pub fn is_xsd_numeric(datatype: &str) -> bool {
    datatype
        .strip_prefix(XSD)
        .is_some_and(|local| XSD_NUMERIC_LOCAL.contains(&local))
}

pub fn is_xsd_string(datatype: &str) -> bool {
    datatype == XSD_STRING
}

/// 1-based version number, assigned in ingestion order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VersionOrdinal(NonZeroU32);

impl VersionOrdinal {
    pub fn new(ordinal: u32) -> Option<Self> {
        NonZeroU32::new(ordinal).map(Self)
    }

    pub fn get(self) -> u32 {
        self.0.get()
    }

    /// Position of this version inside a version bitmap.
    pub fn bit_index(self) -> usize {
        (self.0.get() - 1) as usize
    }

    pub fn from_bit_index(index: usize) -> Self {
        Self::new(index as u32 + 1).expect("bit index overflow")
    }

    pub fn iri(self) -> Term {
        version_iri(self)
    }
}

impl fmt::Display for VersionOrdinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// IRI of the `counter`-th minted versioned named graph.
pub fn mint_vng_iri(counter: u64) -> Term {
    Term::Iri(format!("{VNG_PREFIX}{counter}"))
}

pub fn version_iri(version: VersionOrdinal) -> Term {
    Term::Iri(format!("{VERSION_PREFIX}{version}"))
}

/// Inverse of [`mint_vng_iri`]; only canonical decimal counters are accepted.
pub fn parse_vng_counter(iri: &str) -> Option<u64> {
    parse_counter(iri.strip_prefix(VNG_PREFIX)?)
}

pub fn parse_version_iri(iri: &str) -> Option<VersionOrdinal> {
    let n = parse_counter(iri.strip_prefix(VERSION_PREFIX)?)?;
    VersionOrdinal::new(u32::try_from(n).ok()?)
}

fn parse_counter(digits: &str) -> Option<u64> {
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|&n| n > 0)
}

pub fn is_version_of() -> Term {
    Term::Iri(IS_VERSION_OF.to_owned())
}

pub fn is_in_version() -> Term {
    Term::Iri(IS_IN_VERSION.to_owned())
}

/// A versioned named graph: one named graph at one version.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VngRecord {
    pub iri: Term,
    pub graph: Term,
    pub version: VersionOrdinal,
}

impl VngRecord {
    pub fn metadata_triples(&self) -> [Triple; 2] {
        [
            Triple {
                subject: self.iri.clone(),
                predicate: is_version_of(),
                object: self.graph.clone(),
            },
            Triple {
                subject: self.iri.clone(),
                predicate: is_in_version(),
                object: self.version.iri(),
            },
        ]
    }
}

/// Triples of the default graph, in insertion order without duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetadataGraph {
    triples: IndexSet<Triple>,
}

impl MetadataGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when the triple was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }
}

impl FromIterator<Triple> for MetadataGraph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Self {
            triples: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn v(n: u32) -> VersionOrdinal {
        VersionOrdinal::new(n).unwrap()
    }

    #[test]
    fn minting_examples() {
        assert_eq!(mint_vng_iri(1), Term::iri("urn:converg:vng:1").unwrap());
        assert_eq!(mint_vng_iri(2), Term::iri("urn:converg:vng:2").unwrap());
        assert_eq!(mint_vng_iri(4), Term::iri("urn:converg:vng:4").unwrap());
    }

    #[test]
    fn version_iris() {
        assert_eq!(version_iri(v(1)).as_iri(), Some("urn:converg:version:1"));
        assert_eq!(version_iri(v(2)).as_iri(), Some("urn:converg:version:2"));
        assert_eq!(version_iri(v(17)).as_iri(), Some("urn:converg:version:17"));
        assert_eq!(parse_version_iri("urn:converg:version:17"), Some(v(17)));
        assert_eq!(parse_version_iri("urn:converg:version:0"), None);
    }

    #[test]
    fn vng_counter_parsing_is_canonical() {
        assert_eq!(parse_vng_counter("urn:converg:vng:3"), Some(3));
        assert_eq!(parse_vng_counter("urn:converg:vng:03"), None);
        assert_eq!(parse_vng_counter("urn:converg:vng:0"), None);
        assert_eq!(parse_vng_counter("urn:converg:vng:"), None);
        assert_eq!(parse_vng_counter("urn:example:not-a-vng"), None);
    }

    #[test]
    fn minting_is_injective() {
        let iris: HashSet<Term> = (1..=5000).map(mint_vng_iri).collect();
        assert_eq!(iris.len(), 5000);
        for n in [1u64, 99, 5000] {
            assert_eq!(parse_vng_counter(mint_vng_iri(n).as_iri().unwrap()), Some(n));
        }
    }

    #[test]
    fn numeric_datatypes() {
        assert!(is_xsd_numeric(XSD_DECIMAL));
        assert!(is_xsd_numeric(XSD_INT));
        assert!(!is_xsd_numeric(XSD_STRING));
        assert!(!is_xsd_numeric("urn:integer"));
    }

    #[test]
    fn record_metadata() {
        let rec = VngRecord {
            iri: mint_vng_iri(1),
            graph: Term::iri("urn:ng:Gr-Lyon").unwrap(),
            version: v(1),
        };
        let [a, b] = rec.metadata_triples();
        assert_eq!(a.to_string(), "<urn:converg:vng:1> <urn:converg:vocab:is-version-of> <urn:ng:Gr-Lyon> .");
        assert_eq!(b.to_string(), "<urn:converg:vng:1> <urn:converg:vocab:is-in-version> <urn:converg:version:1> .");
    }
}
