//! Evaluation over the condensed store.
//!
//! Patterns inside `GRAPH ?g` are evaluated once over all versions: each row
//! carries the graph and the bitmap of versions in which it holds, built by
//! AND-ing entry bitmaps. Rows are expanded to one solution per set version
//! at the GRAPH boundary. Inner patterns that mention `?g`, nest another
//! GRAPH, or aggregate fall back to one evaluation per versioned graph.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;

use super::join::{self, CondensedRow, Solution};
use super::overlay::Overlay;
use super::EngineError;
use crate::dictionary::TermId;
use crate::numeric::Number;
use crate::sparql::{AggregateFunction, AggregatePlan, Column, PatternPlan, PlanTerm, SelectPlan, TriplePlan, VarId};
use crate::store::{QuadPattern, Store, VersionBitmap};
use crate::term::{sparql_cmp, Term};
use crate::vocab::{self, VersionOrdinal};

/// Active graph for pattern matching.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Scope {
    /// The metadata graph.
    Default,
    /// One versioned named graph.
    Vng { graph: TermId, version: VersionOrdinal },
}

pub(crate) struct Evaluator<'s> {
    store: &'s Store,
    width: usize,
    pub(crate) terms: Overlay<'s>,
    /// Overlay id of each vng IRI, by vng index.
    vng_ids: Vec<TermId>,
    meta: Vec<[TermId; 3]>,
    meta_by_predicate: HashMap<TermId, Vec<usize>>,
}

impl<'s> Evaluator<'s> {
    pub fn new(store: &'s Store, width: usize) -> Self {
        let mut terms = Overlay::new(store.dictionary());
        let vng_ids: Vec<TermId> = store
            .vng_entries()
            .iter()
            .map(|v| terms.intern(&vocab::mint_vng_iri(v.counter)))
            .collect();
        let is_version_of = terms.intern(&vocab::is_version_of());
        let is_in_version = terms.intern(&vocab::is_in_version());
        let mut meta = Vec::with_capacity(2 * vng_ids.len() + store.user_metadata().len());
        for (v, &id) in store.vng_entries().iter().zip(&vng_ids) {
            meta.push([id, is_version_of, v.graph]);
            let version = terms.intern(&vocab::version_iri(v.version));
            meta.push([id, is_in_version, version]);
        }
        for t in store.user_metadata().iter() {
            meta.push([terms.intern(&t.subject), terms.intern(&t.predicate), terms.intern(&t.object)]);
        }
        let mut meta_by_predicate: HashMap<TermId, Vec<usize>> = HashMap::new();
        for (i, t) in meta.iter().enumerate() {
            meta_by_predicate.entry(t[1]).or_default().push(i);
        }
        Self {
            store,
            width,
            terms,
            vng_ids,
            meta,
            meta_by_predicate,
        }
    }

    fn empty_solution(&self) -> Solution {
        vec![None; self.width]
    }

    fn vng_id(&self, graph: TermId, version: VersionOrdinal) -> TermId {
        let idx = self
            .store
            .vng_index(graph, version)
            .expect("a set version bit implies a minted vng");
        self.vng_ids[idx]
    }

    pub fn select(&mut self, s: &SelectPlan, scope: Scope) -> Result<Vec<Solution>, EngineError> {
        let rows = self.eval(&s.pattern, scope)?;
        if s.is_grouped() {
            self.group(rows, s)
        } else {
            let outputs = s.outputs();
            Ok(rows.into_iter().map(|r| self.project(&r, &outputs)).collect())
        }
    }

    fn project(&self, row: &Solution, outputs: &[VarId]) -> Solution {
        let mut out = self.empty_solution();
        for &v in outputs {
            out[v] = row[v];
        }
        out
    }

    pub fn eval(&mut self, p: &PatternPlan, scope: Scope) -> Result<Vec<Solution>, EngineError> {
        match p {
            PatternPlan::Bgp(ts) => Ok(match scope {
                Scope::Default => self.bgp_metadata(ts),
                Scope::Vng { graph, version } => {
                    let mask = VersionBitmap::single(version);
                    self.condensed_bgp(ts, Some(graph), Some(&mask))
                        .into_iter()
                        .map(|r| r.solution)
                        .collect()
                }
            }),
            PatternPlan::Graph(target, inner) => self.graph(target, inner),
            PatternPlan::Join(children) => {
                let mut acc = vec![self.empty_solution()];
                for c in children {
                    let rows = self.eval(c, scope)?;
                    acc = join::join(acc, rows);
                }
                Ok(acc)
            }
            PatternPlan::Minus(l, r) => {
                let left = self.eval(l, scope)?;
                let right = self.eval(r, scope)?;
                Ok(join::minus(left, right))
            }
            PatternPlan::SubSelect(s) => self.select(s, scope),
        }
    }

    fn graph(&mut self, target: &PlanTerm, inner: &PatternPlan) -> Result<Vec<Solution>, EngineError> {
        match target {
            PlanTerm::Const(iri) => match self.store.resolve_vng(iri) {
                Ok((graph, version)) => self.eval(inner, Scope::Vng { graph, version }),
                Err(_) => {
                    log::warn!("GRAPH {iri} is not a versioned named graph; it matches nothing");
                    // Still evaluate for error parity (e.g. SUM over non-numbers).
                    Ok(Vec::new())
                }
            },
            PlanTerm::Var(g) if condensable(inner, *g) => {
                let rows = self.condensed(inner)?;
                Ok(self.expand(rows, *g))
            }
            PlanTerm::Var(g) => {
                let mut out = Vec::new();
                for (idx, v) in self.store.vng_entries().iter().enumerate() {
                    let id = self.vng_ids[idx];
                    let scope = Scope::Vng {
                        graph: v.graph,
                        version: v.version,
                    };
                    for mut row in self.eval(inner, scope)? {
                        if row[*g].is_none_or(|x| x == id) {
                            row[*g] = Some(id);
                            out.push(row);
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// One solution per set version, binding `graph_var` to that vng.
    fn expand(&self, rows: Vec<CondensedRow>, graph_var: VarId) -> Vec<Solution> {
        let mut out = Vec::new();
        for r in rows {
            for v in r.versions.iter() {
                let mut s = r.solution.clone();
                s[graph_var] = Some(self.vng_id(r.graph, v));
                out.push(s);
            }
        }
        out
    }

    /// Condensed evaluation of a pattern accepted by [`condensable`].
    pub fn condensed(&mut self, p: &PatternPlan) -> Result<Vec<CondensedRow>, EngineError> {
        Ok(match p {
            PatternPlan::Bgp(ts) => self.condensed_bgp(ts, None, None),
            PatternPlan::Join(children) => {
                let mut iter = children.iter();
                let mut acc = match iter.next() {
                    Some(c) => self.condensed(c)?,
                    None => self.condensed_bgp(&[], None, None),
                };
                for c in iter {
                    let rows = self.condensed(c)?;
                    acc = join::join(acc, rows);
                }
                acc
            }
            PatternPlan::Minus(l, r) => {
                let left = self.condensed(l)?;
                let right = self.condensed(r)?;
                join::minus(left, right)
            }
            PatternPlan::SubSelect(s) => {
                let outputs = s.outputs();
                let mut rows = self.condensed(&s.pattern)?;
                for r in &mut rows {
                    r.solution = self.project(&r.solution, &outputs);
                }
                rows
            }
            PatternPlan::Graph(..) => unreachable!("nested GRAPH is never condensed"),
        })
    }

    /// Index nested-loop evaluation of a BGP over entries, optionally limited
    /// to one graph and a version mask.
    pub fn condensed_bgp(
        &mut self,
        triples: &[TriplePlan],
        graph: Option<TermId>,
        mask: Option<&VersionBitmap>,
    ) -> Vec<CondensedRow> {
        let restrict = |bits: &VersionBitmap| match mask {
            Some(m) => bits.and(m),
            None => bits.clone(),
        };
        if triples.is_empty() {
            return self
                .store
                .graphs()
                .filter(|(g, _)| graph.is_none_or(|x| x == *g))
                .filter_map(|(g, presence)| {
                    let versions = restrict(presence);
                    (!versions.is_empty()).then(|| CondensedRow {
                        solution: self.empty_solution(),
                        graph: g,
                        versions,
                    })
                })
                .collect();
        }
        let Some(consts) = self.resolve_constants(triples) else {
            return Vec::new();
        };
        let order = evaluation_order(triples);
        let first = order[0];
        let mut rows = Vec::new();
        let empty = self.empty_solution();
        for e in self.store.lookup(quad_pattern(graph, &consts[first], &triples[first], &empty)) {
            let versions = restrict(&e.versions);
            if versions.is_empty() {
                continue;
            }
            if let Some(solution) = bind(&empty, &triples[first], [e.subject, e.predicate, e.object]) {
                rows.push(CondensedRow {
                    solution,
                    graph: e.graph,
                    versions,
                });
            }
        }
        for &i in &order[1..] {
            let t = &triples[i];
            let mut next = Vec::new();
            for row in &rows {
                for e in self
                    .store
                    .lookup(quad_pattern(Some(row.graph), &consts[i], t, &row.solution))
                {
                    let versions = row.versions.and(&e.versions);
                    if versions.is_empty() {
                        continue;
                    }
                    if let Some(solution) = bind(&row.solution, t, [e.subject, e.predicate, e.object]) {
                        next.push(CondensedRow {
                            solution,
                            graph: row.graph,
                            versions,
                        });
                    }
                }
            }
            rows = next;
            if rows.is_empty() {
                break;
            }
        }
        rows
    }

    /// Store ids for each constant position; `None` if some constant is not
    /// in the store, in which case no entry can match.
    fn resolve_constants(&self, triples: &[TriplePlan]) -> Option<Vec<[Option<TermId>; 3]>> {
        let dict = self.store.dictionary();
        triples
            .iter()
            .map(|t| {
                let mut out = [None; 3];
                for (slot, term) in out.iter_mut().zip(t.terms()) {
                    if let PlanTerm::Const(c) = term {
                        *slot = Some(dict.lookup(c)?);
                    }
                }
                Some(out)
            })
            .collect()
    }

    fn bgp_metadata(&mut self, triples: &[TriplePlan]) -> Vec<Solution> {
        let consts: Vec<[Option<TermId>; 3]> = triples
            .iter()
            .map(|t| {
                let mut out = [None; 3];
                for (slot, term) in out.iter_mut().zip(t.terms()) {
                    if let PlanTerm::Const(c) = term {
                        *slot = Some(self.terms.intern(c));
                    }
                }
                out
            })
            .collect();
        let mut rows = vec![self.empty_solution()];
        for (t, c) in triples.iter().zip(&consts) {
            let candidates: Vec<usize> = match c[1] {
                Some(p) => self.meta_by_predicate.get(&p).cloned().unwrap_or_default(),
                None => (0..self.meta.len()).collect(),
            };
            let mut next = Vec::new();
            for row in &rows {
                for &i in &candidates {
                    let triple = self.meta[i];
                    if c.iter().zip(triple).any(|(c, x)| c.is_some_and(|c| c != x)) {
                        continue;
                    }
                    if let Some(s) = bind(row, t, triple) {
                        next.push(s);
                    }
                }
            }
            rows = next;
        }
        rows
    }

    fn group(&mut self, rows: Vec<Solution>, s: &SelectPlan) -> Result<Vec<Solution>, EngineError> {
        let keys = s.group_by.clone().unwrap_or_default();
        let mut groups: IndexMap<Vec<Option<TermId>>, Vec<usize>> = IndexMap::new();
        for (i, r) in rows.iter().enumerate() {
            groups.entry(keys.iter().map(|&k| r[k]).collect()).or_default().push(i);
        }
        if groups.is_empty() && s.group_by.is_none() {
            groups.insert(Vec::new(), Vec::new());
        }
        let mut out = Vec::with_capacity(groups.len());
        for (key, members) in groups {
            let mut sol = self.empty_solution();
            for (&k, v) in keys.iter().zip(&key) {
                sol[k] = *v;
            }
            for c in &s.columns {
                if let Column::Aggregate(a) = c {
                    sol[a.output] = self.aggregate(a, members.iter().map(|&i| &rows[i]), &key)?;
                }
            }
            out.push(self.project(&sol, &s.outputs()));
        }
        Ok(out)
    }

    fn aggregate<'r>(
        &mut self,
        a: &AggregatePlan,
        rows: impl Iterator<Item = &'r Solution>,
        key: &[Option<TermId>],
    ) -> Result<Option<TermId>, EngineError> {
        let values = rows.filter_map(|r| r[a.argument]);
        Ok(match a.function {
            AggregateFunction::Count => Some(self.terms.intern(&Term::integer(values.count() as u64))),
            AggregateFunction::CountDistinct => {
                let n = values.collect::<HashSet<_>>().len();
                Some(self.terms.intern(&Term::integer(n as u64)))
            }
            AggregateFunction::Max => values.max_by(|x, y| sparql_cmp(self.terms.decode(*x), self.terms.decode(*y))),
            AggregateFunction::Min => values.min_by(|x, y| sparql_cmp(self.terms.decode(*x), self.terms.decode(*y))),
            AggregateFunction::Sum => {
                let mut total = Number::zero();
                for v in values {
                    let term = self.terms.decode(v);
                    match term.as_literal().and_then(|l| l.numeric_value()) {
                        Some(n) => total = total.add(&n),
                        None => {
                            let group = key
                                .iter()
                                .map(|k| k.map_or("UNDEF".to_owned(), |id| self.terms.decode(id).to_string()))
                                .collect::<Vec<_>>()
                                .join(" ");
                            return Err(EngineError::NonNumericSum {
                                group,
                                value: term.to_string(),
                            });
                        }
                    }
                }
                Some(self.terms.intern(&super::sum_term(&total)))
            }
        })
    }
}

/// Whether `GRAPH ?graph_var { p }` can be evaluated on condensed rows.
pub(crate) fn condensable(p: &PatternPlan, graph_var: VarId) -> bool {
    match p {
        PatternPlan::Bgp(ts) => !ts.iter().any(|t| t.terms().iter().any(|x| x.var() == Some(graph_var))),
        PatternPlan::Join(cs) => cs.iter().all(|c| condensable(c, graph_var)),
        PatternPlan::Minus(l, r) => condensable(l, graph_var) && condensable(r, graph_var),
        PatternPlan::SubSelect(s) => !s.is_grouped() && !p.mentions(graph_var) && condensable(&s.pattern, graph_var),
        PatternPlan::Graph(..) => false,
    }
}

/// Greedy order: next the pattern with most positions fixed by constants or
/// already-bound variables; ties keep source order.
fn evaluation_order(triples: &[TriplePlan]) -> Vec<usize> {
    let mut bound: HashSet<VarId> = HashSet::new();
    let mut remaining: Vec<usize> = (0..triples.len()).collect();
    let mut order = Vec::with_capacity(triples.len());
    while !remaining.is_empty() {
        let score = |i: usize| {
            triples[i]
                .terms()
                .iter()
                .filter(|t| t.var().is_none_or(|v| bound.contains(&v)))
                .count()
        };
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| score(**a).cmp(&score(**b)).then(ib.cmp(ia)))
            .expect("non-empty");
        let i = remaining.remove(pos);
        bound.extend(triples[i].terms().iter().filter_map(|t| t.var()));
        order.push(i);
    }
    order
}

fn quad_pattern(graph: Option<TermId>, consts: &[Option<TermId>; 3], t: &TriplePlan, sol: &Solution) -> QuadPattern {
    let pos = |i: usize, term: &PlanTerm| consts[i].or_else(|| term.var().and_then(|v| sol[v]));
    QuadPattern {
        graph,
        subject: pos(0, &t.subject),
        predicate: pos(1, &t.predicate),
        object: pos(2, &t.object),
    }
}

/// Extends `sol` with the variables of `t` matched against `values`.
fn bind(sol: &Solution, t: &TriplePlan, values: [TermId; 3]) -> Option<Solution> {
    let mut out = sol.clone();
    for (term, value) in t.terms().into_iter().zip(values) {
        if let PlanTerm::Var(v) = term {
            match out[*v] {
                Some(x) if x != value => return None,
                _ => out[*v] = Some(value),
            }
        }
    }
    Some(out)
}
