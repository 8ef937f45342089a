use super::*;
use crate::nquads::{parse_nquads, ParseMode};
use crate::vocab::{mint_vng_iri, XSD_DECIMAL};
use proptest::prelude::*;
use std::collections::BTreeSet;

const V1: &str = include_str!("../../tests/fixtures/buildings_v1.nq");
const V2: &str = include_str!("../../tests/fixtures/buildings_v2.nq");

fn doc(text: &str) -> ParsedDocument {
    parse_nquads(text.as_bytes(), ParseMode::Strict).unwrap()
}

fn iri(s: &str) -> Term {
    Term::iri(s).unwrap()
}

fn dec(s: &str) -> Term {
    Term::typed_literal(s, XSD_DECIMAL).unwrap()
}

fn v(n: u32) -> VersionOrdinal {
    VersionOrdinal::new(n).unwrap()
}

pub(crate) fn buildings() -> Store {
    let mut s = Store::new();
    s.ingest_version(&doc(V1), Some("first")).unwrap();
    s.ingest_version(&doc(V2), None).unwrap();
    s
}

fn id(s: &Store, t: &Term) -> TermId {
    s.dictionary().lookup(t).unwrap()
}

#[test]
fn ingest_version_one() {
    let mut s = Store::new();
    let r = s.ingest_version(&doc(V1), None).unwrap();
    assert_eq!(r.ordinal, v(1));
    assert_eq!(r.quad_count, 3);
    assert_eq!(r.new_entry_count, 3);
    let minted: Vec<_> = r.minted_vngs.iter().map(|m| (m.iri.clone(), m.graph.clone())).collect();
    assert_eq!(
        minted,
        vec![
            (mint_vng_iri(1), iri("urn:ng:Gr-Lyon")),
            (mint_vng_iri(2), iri("urn:ng:IGN")),
        ]
    );
    assert!(s.entries().iter().all(|e| e.versions.render(1) == "1"));
}

#[test]
fn ingest_version_two_condenses() {
    let s = buildings();
    assert_eq!(s.entries().len(), 5);
    let e = s
        .get_entry(
            id(&s, &iri("urn:ng:Gr-Lyon")),
            id(&s, &iri("urn:ex:bldg1")),
            id(&s, &iri("urn:ex:height")),
            id(&s, &dec("10.5")),
        )
        .unwrap();
    assert_eq!(e.versions.render(2), "11");
    assert_eq!(s.label(v(1)), Some("first"));
    assert_eq!(s.label(v(2)), None);
}

#[test]
fn empty_document_is_a_version() {
    let mut s = buildings();
    let before = s.stats();
    let r = s.ingest_version(&ParsedDocument::default(), None).unwrap();
    assert_eq!(r.ordinal, v(3));
    assert!(r.minted_vngs.is_empty());
    assert_eq!(r.new_entry_count, 0);
    let after = s.stats();
    assert_eq!(after.versions, 3);
    assert_eq!((after.entries, after.vngs, after.flat_quads), (before.entries, before.vngs, before.flat_quads));
}

#[test]
fn duplicates_are_reported() {
    let mut s = Store::new();
    let text = format!("{}{}", V1, V1.lines().next().unwrap());
    let r = s.ingest_version(&doc(&text), None).unwrap();
    assert_eq!((r.quad_count, r.duplicate_count), (3, 1));
    assert_eq!(s.stats().flat_quads, 3);
}

#[test]
fn default_graph_quad_rejected_atomically() {
    let mut s = buildings();
    let snapshot = s.clone();
    let bad = format!("{V1}<urn:new:s> <urn:new:p> <urn:new:o> .\n");
    let err = s.ingest_version(&doc(&bad), None).unwrap_err();
    assert!(matches!(err, StoreError::DefaultGraphQuad { line: 4 }));
    assert_eq!(s, snapshot);
    assert!(matches!(s.ingest_version(&doc(V1), Some("a\nb")), Err(StoreError::InvalidLabel)));
    assert_eq!(s, snapshot);
}

#[test]
fn lookup_examples() {
    let s = buildings();
    let gl = id(&s, &iri("urn:ng:Gr-Lyon"));
    let height = id(&s, &iri("urn:ex:height"));
    let hits: Vec<_> = s
        .lookup(QuadPattern {
            graph: Some(gl),
            predicate: Some(height),
            ..Default::default()
        })
        .map(|e| (s.decode(e.subject).clone(), s.decode(e.object).clone()))
        .collect();
    assert_eq!(
        hits,
        vec![
            (iri("urn:ex:bldg1"), dec("10.5")),
            (iri("urn:ex:bldg2"), dec("9.1")),
            (iri("urn:ex:bldg3"), dec("15")),
        ]
    );
    let e = &s.entries()[2];
    let exact = QuadPattern {
        graph: Some(e.graph),
        subject: Some(e.subject),
        predicate: Some(e.predicate),
        object: Some(e.object),
    };
    assert_eq!(s.lookup(exact).count(), 1);
    let unknown = QuadPattern {
        object: Some(TermId(999)),
        ..Default::default()
    };
    assert_eq!(s.lookup(unknown).count(), 0);
    assert_eq!(s.lookup(QuadPattern::default()).count(), 5);
}

#[test]
fn resolve_vng_examples() {
    let s = buildings();
    let gl = id(&s, &iri("urn:ng:Gr-Lyon"));
    assert_eq!(s.resolve_vng(&iri("urn:converg:vng:3")).unwrap(), (gl, v(2)));
    assert_eq!(s.resolve_vng(&iri("urn:converg:vng:1")).unwrap(), (gl, v(1)));
    assert!(matches!(
        s.resolve_vng(&iri("urn:example:not-a-vng")),
        Err(StoreError::UnknownVng(_))
    ));
    assert!(s.resolve_vng(&iri("urn:converg:vng:5")).is_err());
}

#[test]
fn flat_export_counts() {
    let s = buildings();
    let flat = s.export_flat();
    let (data, meta): (Vec<_>, Vec<_>) = flat.iter().partition(|q| {
        q.graph
            .as_ref()
            .is_some_and(|g| g.as_iri().unwrap().starts_with(crate::vocab::VNG_PREFIX))
    });
    assert_eq!(data.len(), 6);
    assert_eq!(meta.len(), 8);
    assert!(meta.iter().all(|q| q.graph.is_none()));
    assert!(Store::new().export_flat().is_empty());
}

#[test]
fn diff_examples() {
    let s = buildings();
    let vng = |n| mint_vng_iri(n);
    let t = |subj: &str, h: &str| Triple {
        subject: iri(subj),
        predicate: iri("urn:ex:height"),
        object: dec(h),
    };
    assert_eq!(s.diff_vng(&vng(3), &vng(1)).unwrap(), vec![t("urn:ex:bldg3", "15")]);
    assert_eq!(s.diff_vng(&vng(1), &vng(3)).unwrap(), vec![t("urn:ex:bldg2", "9.1")]);
    assert!(s.diff_vng(&vng(2), &vng(2)).unwrap().is_empty());
    // cross-graph: IGN v2 = {bldg1 10.5} ⊂ Gr-Lyon v1
    assert!(s.diff_vng(&vng(4), &vng(1)).unwrap().is_empty());
    assert_eq!(s.diff_vng(&vng(1), &vng(4)).unwrap(), vec![t("urn:ex:bldg2", "9.1")]);
    assert!(s.diff_vng(&vng(1), &iri("urn:x")).is_err());
}

#[test]
fn stats_examples() {
    let s = buildings();
    let st = s.stats();
    assert_eq!(
        (st.versions, st.graphs, st.vngs, st.entries, st.flat_quads, st.metadata_triples),
        (2, 2, 4, 5, 6, 8)
    );
    assert_eq!(Store::new().stats(), Stats::default());
    assert_eq!(
        st.to_string(),
        "versions=2\ngraphs=2\nvngs=4\nentries=5\nflat-quads=6\nmetadata-triples=8\n"
    );
}

#[test]
fn blank_nodes_are_scoped_per_version() {
    let mut s = Store::new();
    let text = "_:b <urn:p> \"x\" <urn:g> .\n";
    s.ingest_version(&doc(text), None).unwrap();
    s.ingest_version(&doc(text), None).unwrap();
    assert_eq!(s.entries().len(), 2);
    assert!(s.entries().iter().all(|e| e.versions.count() == 1));
}

#[test]
fn user_metadata() {
    let mut s = buildings();
    let t = Triple::new(iri("urn:converg:vng:1"), iri("urn:dc:creator"), Term::simple_literal("me")).unwrap();
    assert_eq!(s.add_metadata([t.clone(), t.clone()]).unwrap(), 1);
    assert!(s.metadata().contains(&t));
    assert_eq!(s.stats().metadata_triples, 9);
    let reserved = Triple::new(iri("urn:x"), crate::vocab::is_in_version(), iri("urn:y")).unwrap();
    assert!(matches!(s.add_metadata([reserved]), Err(StoreError::ReservedPredicate(_))));
}

#[test]
fn metadata_round_trips_through_flat_export() {
    let mut s = buildings();
    s.add_metadata([Triple::new(iri("urn:a"), iri("urn:b"), Term::simple_literal("c\nd")).unwrap()])
        .unwrap();
    let bytes = crate::nquads::serialize_nquads(&s.export_flat());
    let reparsed = doc(std::str::from_utf8(&bytes).unwrap());
    let meta: MetadataGraph = reparsed
        .quads
        .iter()
        .filter(|q| q.graph.is_none())
        .map(Quad::triple)
        .collect();
    assert_eq!(meta, s.metadata());
}

#[test]
fn snapshot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("store");
    let mut s = buildings();
    s.add_metadata([Triple::new(iri("urn:a"), iri("urn:b"), iri("urn:c")).unwrap()]).unwrap();
    s.save_snapshot(&path).unwrap();
    let loaded = Store::load_snapshot(&path).unwrap();
    assert_eq!(loaded, s);
    assert_eq!(loaded.dump_entries(), s.dump_entries());
    // overwrite in place
    s.ingest_version(&doc(V1), Some("again")).unwrap();
    s.save_snapshot(&path).unwrap();
    assert_eq!(Store::load_snapshot(&path).unwrap(), s);
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1);
}

#[test]
fn golden_entries_file() {
    let dir = tempfile::tempdir().unwrap();
    buildings().save_snapshot(dir.path()).unwrap();
    let entries = std::fs::read_to_string(dir.path().join("ENTRIES")).unwrap();
    assert_eq!(entries, include_str!("../../tests/fixtures/buildings.ENTRIES"));
}

#[test]
fn load_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(Store::load_snapshot(dir.path()), Err(StoreError::Corrupt { .. })));

    buildings().save_snapshot(dir.path()).unwrap();
    let entries = dir.path().join("ENTRIES");
    let text = std::fs::read_to_string(&entries).unwrap();
    std::fs::write(&entries, text.replace("\t11\n", "\t10\n")).unwrap();
    match Store::load_snapshot(dir.path()) {
        Err(StoreError::Corrupt { file, message }) => {
            assert_eq!(file, "ENTRIES");
            assert!(message.contains("checksum"));
        }
        other => panic!("expected checksum failure, got {other:?}"),
    }

    buildings().save_snapshot(dir.path()).unwrap();
    let manifest = dir.path().join("MANIFEST");
    let text = std::fs::read_to_string(&manifest).unwrap();
    std::fs::write(&manifest, text.replace("format-version=1", "format-version=2")).unwrap();
    assert!(matches!(
        Store::load_snapshot(dir.path()),
        Err(StoreError::VersionMismatch { .. })
    ));
}

// ---------------------------------------------------------------------------
// Randomized condensation soundness
// ---------------------------------------------------------------------------

fn arb_versions() -> impl Strategy<Value = Vec<Vec<Quad>>> {
    let quad = (0..3u8, 0..4u8, 0..2u8, 0..5u8).prop_map(|(g, s, p, o)| {
        let object = if o % 2 == 0 {
            Term::iri(format!("urn:o:{o}")).unwrap()
        } else {
            Term::simple_literal(o.to_string())
        };
        Quad::new(
            iri(&format!("urn:s:{s}")),
            iri(&format!("urn:p:{p}")),
            object,
            Some(iri(&format!("urn:g:{g}"))),
        )
        .unwrap()
    });
    prop::collection::vec(prop::collection::vec(quad, 0..50), 1..=4)
}

type FlatKey = (Term, Term, Term, Term);

fn key(q: &Quad, graph: Term) -> FlatKey {
    (graph, q.subject.clone(), q.predicate.clone(), q.object.clone())
}

proptest! {
    #[test]
    fn condensation_is_sound(versions in arb_versions()) {
        let mut s = Store::new();
        let mut expected_vngs = 0;
        for quads in &versions {
            s.ingest_version(&ParsedDocument::from_quads(quads.clone()), None).unwrap();
            expected_vngs += quads.iter().map(|q| q.graph.clone()).collect::<std::collections::HashSet<_>>().len();
        }
        prop_assert_eq!(s.stats().vngs as usize, expected_vngs);
        let records: Vec<VngRecord> = s.vng_records().collect();
        for (m, quads) in versions.iter().enumerate() {
            let ordinal = v(m as u32 + 1);
            let expected: BTreeSet<String> = quads
                .iter()
                .map(|q| format!("{:?}", key(q, q.graph.clone().unwrap())))
                .collect();
            let got: BTreeSet<String> = s
                .export_flat()
                .iter()
                .filter_map(|q| {
                    let g = q.graph.as_ref()?;
                    let rec = records.iter().find(|r| &r.iri == g)?;
                    (rec.version == ordinal).then(|| format!("{:?}", key(q, rec.graph.clone())))
                })
                .collect();
            prop_assert_eq!(got, expected);
        }
        for e in s.entries() {
            prop_assert!(!e.versions.is_empty());
            prop_assert!(e.versions.last().unwrap().get() <= s.version_count());
        }
    }

    #[test]
    fn diff_partitions_union(versions in arb_versions(), a in 0usize..12, b in 0usize..12) {
        let mut s = Store::new();
        for quads in &versions {
            s.ingest_version(&ParsedDocument::from_quads(quads.clone()), None).unwrap();
        }
        let recs: Vec<VngRecord> = s.vng_records().collect();
        prop_assume!(!recs.is_empty());
        let (ra, rb) = (&recs[a % recs.len()], &recs[b % recs.len()]);
        let members = |r: &VngRecord| -> BTreeSet<String> {
            s.export_flat()
                .iter()
                .filter(|q| q.graph.as_ref() == Some(&r.iri))
                .map(|q| q.triple().to_string())
                .collect()
        };
        let (set_a, set_b) = (members(ra), members(rb));
        let a_minus_b: BTreeSet<String> = s.diff_vng(&ra.iri, &rb.iri).unwrap().iter().map(|t| t.to_string()).collect();
        let b_minus_a: BTreeSet<String> = s.diff_vng(&rb.iri, &ra.iri).unwrap().iter().map(|t| t.to_string()).collect();
        let both: BTreeSet<String> = set_a.intersection(&set_b).cloned().collect();
        prop_assert!(a_minus_b.is_disjoint(&b_minus_a));
        prop_assert!(a_minus_b.is_disjoint(&both));
        prop_assert!(b_minus_a.is_disjoint(&both));
        let union: BTreeSet<String> = a_minus_b.iter().chain(&b_minus_a).chain(&both).cloned().collect();
        prop_assert_eq!(union, set_a.union(&set_b).cloned().collect::<BTreeSet<_>>());
    }

    #[test]
    fn flat_quads_grow_by_deduplicated_count(versions in arb_versions()) {
        let mut s = Store::new();
        for quads in &versions {
            let before = s.stats().flat_quads;
            let r = s.ingest_version(&ParsedDocument::from_quads(quads.clone()), None).unwrap();
            prop_assert_eq!(s.stats().flat_quads - before, r.quad_count as u64);
        }
    }
}
