//! Seeded generators for stores, queries and quads shared by the
//! integration suites.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fmt::Write as _;

use converg::vocab::{XSD_DECIMAL, XSD_INTEGER};
use converg::{Literal, ParsedDocument, Quad, Store, Term, Triple};
use rand::seq::SliceRandom;
use rand::Rng;

pub const VERS: &str = "urn:converg:vocab:";

pub fn iri(s: &str) -> Term {
    Term::iri(s).unwrap()
}

fn subject(i: usize) -> Term {
    iri(&format!("urn:s{i}"))
}

fn predicate(i: usize) -> Term {
    iri(&format!("urn:p{i}"))
}

fn object(rng: &mut impl Rng) -> Term {
    match rng.gen_range(0..8) {
        0..=3 => subject(rng.gen_range(0..4)),
        4 | 5 => Term::typed_literal(rng.gen_range(1..=3).to_string(), XSD_INTEGER).unwrap(),
        6 => Term::typed_literal(format!("{}.5", rng.gen_range(0..3)), XSD_DECIMAL).unwrap(),
        _ => Term::simple_literal("x"),
    }
}

/// A small store: up to 4 versions, 3 graphs and 50 quads per version,
/// over a vocabulary narrow enough that quads recur across versions.
pub fn random_store(rng: &mut impl Rng) -> Store {
    let versions = rng.gen_range(1..=4);
    let graphs = rng.gen_range(1..=3);
    let mut store = Store::new();
    for _ in 0..versions {
        let n = rng.gen_range(0..=50);
        let quads = (0..n)
            .map(|_| Quad {
                subject: subject(rng.gen_range(0..4)),
                predicate: predicate(rng.gen_range(0..3)),
                object: object(rng),
                graph: Some(iri(&format!("urn:g{}", rng.gen_range(0..graphs)))),
            })
            .collect();
        store.ingest_version(&ParsedDocument::from_quads(quads), None).unwrap();
    }
    if rng.gen_bool(0.3) {
        let t = Triple::new(subject(0), predicate(0), object(rng)).unwrap();
        store.add_metadata([t]).unwrap();
    }
    store
}

/// Subject and object variables; predicates use their own names so that a
/// variable is never asked to be both a node and a predicate.
const NODES: &[&str] = &["a", "b", "c"];

struct QueryGen<'r, R> {
    rng: &'r mut R,
    vars: BTreeSet<String>,
}

impl<R: Rng> QueryGen<'_, R> {
    fn position(&mut self, pool: &[&str], constant: impl FnOnce(&mut R) -> String) -> String {
        if self.rng.gen_bool(0.7) {
            let v = pool.choose(self.rng).unwrap().to_string();
            self.vars.insert(v.clone());
            format!("?{v}")
        } else {
            constant(self.rng)
        }
    }

    fn bgp(&mut self) -> String {
        let n = self.rng.gen_range(1..=3);
        let mut out = String::new();
        for i in 0..n {
            let s = if i == 0 {
                self.vars.insert("a".into());
                "?a".to_owned()
            } else {
                self.position(NODES, |r| format!("<urn:s{}>", r.gen_range(0..4)))
            };
            let p = self.position(&["p", "q"], |r| format!("<urn:p{}>", r.gen_range(0..3)));
            let o = self.position(NODES, |r| object(r).to_string());
            write!(out, "{s} {p} {o} . ").unwrap();
        }
        out
    }
}

/// A query over [`random_store`] data: a GRAPH block with a BGP of one to
/// three patterns (sometimes wrapped in a sub-select), a constant or
/// variable graph, an optional metadata join, an optional MINUS, and an
/// optional aggregate with or without GROUP BY.
pub fn random_query(rng: &mut impl Rng, vngs: u64) -> String {
    let mut g = QueryGen {
        rng,
        vars: BTreeSet::new(),
    };
    let graph_var = g.rng.gen_bool(0.7);
    let target = if graph_var {
        "?g".to_owned()
    } else {
        format!("<urn:converg:vng:{}>", g.rng.gen_range(1..=vngs + 1))
    };
    let bgp = g.bgp();
    let inner = if g.rng.gen_bool(0.15) {
        let all = std::mem::take(&mut g.vars);
        for v in all {
            if v == "a" || g.rng.gen_bool(0.5) {
                g.vars.insert(v);
            }
        }
        let list: Vec<String> = g.vars.iter().map(|v| format!("?{v}")).collect();
        format!("SELECT {} WHERE {{ {bgp} }}", list.join(" "))
    } else {
        bgp
    };
    let mut body = format!("GRAPH {target} {{ {inner} }} ");
    if graph_var {
        g.vars.insert("g".into());
        match g.rng.gen_range(0..3) {
            0 => {
                body.push_str(&format!("?g <{VERS}is-in-version> ?v . "));
                g.vars.insert("v".into());
            }
            1 => {
                body.push_str(&format!("?g <{VERS}is-version-of> ?gr . "));
                g.vars.insert("gr".into());
            }
            _ => {}
        }
    }
    if g.rng.gen_bool(0.3) {
        let saved = std::mem::take(&mut g.vars);
        let right_graph = if g.rng.gen_bool(0.5) { "?g" } else { "?h" };
        let right = g.bgp();
        g.vars = saved;
        body.push_str(&format!("MINUS {{ GRAPH {right_graph} {{ {right} }} }} "));
    }
    let visible: Vec<String> = g.vars.into_iter().collect();
    let rng = g.rng;
    match rng.gen_range(0..10) {
        0..=5 => {
            let list: Vec<String> = visible.iter().map(|v| format!("?{v}")).collect();
            format!("SELECT {} WHERE {{ {body}}}", list.join(" "))
        }
        k => {
            let function = ["COUNT", "COUNT DISTINCT", "MAX", "MIN", "SUM"].choose(rng).unwrap();
            let arg = visible.choose(rng).unwrap();
            let call = match *function {
                "COUNT DISTINCT" => format!("COUNT(DISTINCT ?{arg})"),
                f => format!("{f}(?{arg})"),
            };
            if k == 9 {
                format!("SELECT ({call} AS ?n) WHERE {{ {body}}}")
            } else {
                let key = visible.choose(rng).unwrap();
                format!("SELECT ?{key} ({call} AS ?n) WHERE {{ {body}}} GROUP BY ?{key}")
            }
        }
    }
}

/// `SELECT ?v (COUNT(?x) AS ?n)` over `GRAPH ?g { BGP }` joined to the
/// version of `?g`, in either join order; the shape the bit-vector count
/// path accepts.
pub fn random_count_query(rng: &mut impl Rng) -> String {
    let mut g = QueryGen {
        rng,
        vars: BTreeSet::new(),
    };
    let bgp = g.bgp();
    let mut candidates: Vec<String> = g.vars.iter().cloned().collect();
    candidates.extend(["g".into(), "v".into()]);
    let rng = g.rng;
    let arg = candidates.choose(rng).unwrap();
    let graph = format!("GRAPH ?g {{ {bgp} }}");
    let meta = format!("?g <{VERS}is-in-version> ?v .");
    let body = if rng.gen_bool(0.5) {
        format!("{graph} {meta}")
    } else {
        format!("{meta} {graph}")
    };
    format!("SELECT ?v (COUNT(?{arg}) AS ?n) WHERE {{ {body} }} GROUP BY ?v")
}

/// Terms exercising escapes, language tags, datatypes and non-ASCII text.
pub fn random_quad(rng: &mut impl Rng) -> Quad {
    const CHARS: &[char] = &['a', 'Z', '0', ' ', '"', '\\', '\n', '\r', '\t', '<', '>', 'é', '\u{1F600}', '.', '#'];
    let text = |r: &mut dyn rand::RngCore| -> String { (0..r.gen_range(0..8)).map(|_| *CHARS.choose(r).unwrap()).collect() };
    let name = |r: &mut dyn rand::RngCore| -> String {
        (0..r.gen_range(1..5)).map(|_| (b'a' + r.gen_range(0..26)) as char).collect()
    };
    let iri_term = |r: &mut dyn rand::RngCore| iri(&format!("urn:t:{}#{}", name(r), r.gen_range(0..100)));
    let blank = |r: &mut dyn rand::RngCore| Term::blank(format!("b{}", name(r))).unwrap();
    let s = if rng.gen_bool(0.8) { iri_term(rng) } else { blank(rng) };
    let o = match rng.gen_range(0..5) {
        0 => iri_term(rng),
        1 => blank(rng),
        2 => Term::simple_literal(text(rng)),
        3 => Term::typed_literal(text(rng), format!("urn:dt:{}", name(rng))).unwrap(),
        _ => Term::Literal(Literal::lang(text(rng), if rng.gen_bool(0.5) { "en" } else { "fr-BE" }).unwrap()),
    };
    let graph = rng.gen_bool(0.7).then(|| iri_term(rng));
    Quad::new(s, iri_term(rng), o, graph).unwrap()
}
