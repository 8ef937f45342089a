//! Deterministic BSBM-shaped version generator.
//!
//! Each version holds, for every graph `g` and product `p`:
//!
//! ```text
//! <…/instances/Product{p}> rdf:type <…/vocabulary/Product> <…/graph{g}> .
//! <…/instances/Product{p}> <…/vocabulary/rating2> "{r}"^^xsd:integer <…/graph{g}> .
//! ```
//!
//! Randomness is a keyed splitmix64 hash, not a stream: the draw for
//! `(seed, tag, version, graph, product)` is `h = seed`, then
//! `h = splitmix64(h ^ x)` for each of `tag, version, graph, product`.
//! Version 1 draws every rating. Version `m > 1` re-rolls a rating when its
//! change draw, read as a fraction in `[0, 1)` from the top 53 bits, is below
//! the change rate. A rating's value at version `m` is therefore the value
//! drawn at the last re-roll at or before `m`, which is found by scanning the
//! change draws backwards; no earlier document is ever built.
//!
//! Replicating every product in every graph is a modelling assumption;
//! only the shape needed by the rating and type queries is reproduced.

use std::fs;
use std::io;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::nquads::{serialize_nquads, ParsedDocument};
use crate::term::{Quad, Term};
use crate::vocab::{self, VersionOrdinal};

pub const BSBM_NAMESPACE: &str = "http://www4.wiwiss.fu-berlin.de/bizer/bsbm/";
pub const RATING_PREDICATE: &str = "http://www4.wiwiss.fu-berlin.de/bizer/bsbm/v01/vocabulary/rating2";
pub const PRODUCT_CLASS: &str = "http://www4.wiwiss.fu-berlin.de/bizer/bsbm/v01/vocabulary/Product";
const INSTANCES: &str = "http://www4.wiwiss.fu-berlin.de/bizer/bsbm/v01/instances/";
const GRAPHS: &str = "http://www4.wiwiss.fu-berlin.de/bizer/bsbm/v01/graph";

const TAG_CHANGE: u64 = 0;
const TAG_VALUE: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub products: u32,
    pub graphs: u32,
    pub versions: u32,
    pub change_rate: f64,
    pub rating_range: RangeInclusive<i64>,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            products: 100,
            graphs: 10,
            versions: 10,
            change_rate: 0.1,
            rating_range: 1..=10,
            seed: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generator configuration: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::Config(m.into()));
        if self.products == 0 {
            return bad("products must be positive");
        }
        if self.graphs == 0 {
            return bad("graphs must be positive");
        }
        if self.versions == 0 {
            return bad("versions must be positive");
        }
        if !(0.0..=1.0).contains(&self.change_rate) {
            return bad("change rate must be within [0, 1]");
        }
        if self.rating_range.is_empty() {
            return bad("rating range is empty");
        }
        Ok(())
    }

    pub fn quads_per_version(&self) -> u64 {
        2 * u64::from(self.products) * u64::from(self.graphs)
    }

    /// Rating of product `p` in graph `g` at `version`.
    pub fn rating(&self, version: VersionOrdinal, graph: u32, product: u32) -> i64 {
        let mut m = version.get();
        while m > 1 && !self.changes(m, graph, product) {
            m -= 1;
        }
        let lo = *self.rating_range.start();
        let span = (*self.rating_range.end() - lo) as u64 + 1;
        let x = self.draw(TAG_VALUE, m, graph, product);
        lo + ((u128::from(x) * u128::from(span)) >> 64) as i64
    }

    fn changes(&self, version: u32, graph: u32, product: u32) -> bool {
        let x = self.draw(TAG_CHANGE, version, graph, product);
        ((x >> 11) as f64 / (1u64 << 53) as f64) < self.change_rate
    }

    fn draw(&self, tag: u64, version: u32, graph: u32, product: u32) -> u64 {
        [tag, u64::from(version), u64::from(graph), u64::from(product)]
            .into_iter()
            .fold(self.seed, |h, x| splitmix64(h ^ x))
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn graph_iri(graph: u32) -> Term {
    Term::iri(format!("{GRAPHS}{graph}")).expect("valid IRI")
}

pub fn product_iri(product: u32) -> Term {
    Term::iri(format!("{INSTANCES}Product{product}")).expect("valid IRI")
}

/// Panics if `version` exceeds `cfg.versions`; call [`GenConfig::validate`] first.
pub fn generate_version(cfg: &GenConfig, version: VersionOrdinal) -> ParsedDocument {
    assert!(version.get() <= cfg.versions, "version {version} beyond configured {}", cfg.versions);
    let rdf_type = Term::iri(vocab::RDF_TYPE).expect("valid IRI");
    let class = Term::iri(PRODUCT_CLASS).expect("valid IRI");
    let rating = Term::iri(RATING_PREDICATE).expect("valid IRI");
    let mut quads = Vec::with_capacity(cfg.quads_per_version() as usize);
    for g in 1..=cfg.graphs {
        let graph = graph_iri(g);
        for p in 1..=cfg.products {
            let subject = product_iri(p);
            let value = Term::typed_literal(cfg.rating(version, g, p).to_string(), vocab::XSD_INTEGER).expect("valid literal");
            quads.push(Quad {
                subject: subject.clone(),
                predicate: rdf_type.clone(),
                object: class.clone(),
                graph: Some(graph.clone()),
            });
            quads.push(Quad {
                subject,
                predicate: rating.clone(),
                object: value,
                graph: Some(graph.clone()),
            });
        }
    }
    ParsedDocument::from_quads(quads)
}

/// File name of a version: `v0001.nq`, widened when there are more than 9999 versions.
pub fn version_file_name(version: VersionOrdinal, versions: u32) -> String {
    let width = versions.to_string().len().max(4);
    format!("v{:0width$}.nq", version.get())
}

/// Writes every version into `dir`, creating it if needed.
pub fn write_versions(cfg: &GenConfig, dir: &Path) -> Result<Vec<PathBuf>, GenError> {
    cfg.validate()?;
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| GenError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut paths = Vec::with_capacity(cfg.versions as usize);
    for m in 1..=cfg.versions {
        let version = VersionOrdinal::new(m).expect("m >= 1");
        let path = dir.join(version_file_name(version, cfg.versions));
        let doc = generate_version(cfg, version);
        fs::write(&path, serialize_nquads(&doc.quads)).map_err(io_err(&path))?;
        paths.push(path);
    }
    Ok(paths)
}
