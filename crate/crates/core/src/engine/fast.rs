//! COUNT grouped by version, computed by adding row bitmaps.
//!
//! Recognised shape:
//!
//! ```text
//! SELECT ?v (COUNT(?x) AS ?n) WHERE {
//!   GRAPH ?g { P }
//!   ?g vers:is-in-version ?v
//! } GROUP BY ?v
//! ```
//!
//! with `P` condensable and not mentioning `?v`. Each vng has exactly one
//! is-in-version triple, so the metadata join never multiplies rows and the
//! count for version `m` is the number of condensed rows with bit `m` set.

use super::eval::{condensable, Evaluator};
use super::EngineError;
use crate::sparql::{AggregateFunction, Column, PatternPlan, Plan, PlanTerm, VarId};
use crate::store::Store;
use crate::term::Term;
use crate::vocab::{self, VersionOrdinal};

pub(crate) struct CountShape<'p> {
    inner: &'p PatternPlan,
    graph_var: VarId,
    version_var: VarId,
    argument: VarId,
}

pub(crate) fn detect(plan: &Plan) -> Option<CountShape<'_>> {
    let root = &plan.root;
    let [version_var] = root.group_by.as_deref()? else {
        return None;
    };
    let version_var = *version_var;
    let argument = match root.columns.as_slice() {
        [Column::Var(v), Column::Aggregate(a)] | [Column::Aggregate(a), Column::Var(v)]
            if *v == version_var && a.function == AggregateFunction::Count =>
        {
            a.argument
        }
        _ => return None,
    };
    let PatternPlan::Join(children) = &root.pattern else {
        return None;
    };
    let (graph, meta) = match children.as_slice() {
        [g @ PatternPlan::Graph(..), m @ PatternPlan::Bgp(_)] | [m @ PatternPlan::Bgp(_), g @ PatternPlan::Graph(..)] => (g, m),
        _ => return None,
    };
    let PatternPlan::Graph(PlanTerm::Var(graph_var), inner) = graph else {
        return None;
    };
    let PatternPlan::Bgp(triples) = meta else {
        return None;
    };
    let [t] = triples.as_slice() else {
        return None;
    };
    let is_link = t.subject == PlanTerm::Var(*graph_var)
        && t.predicate == PlanTerm::Const(vocab::is_in_version())
        && t.object == PlanTerm::Var(version_var);
    if !is_link || *graph_var == version_var || inner.mentions(version_var) || !condensable(inner, *graph_var) {
        return None;
    }
    Some(CountShape {
        inner,
        graph_var: *graph_var,
        version_var,
        argument,
    })
}

pub(crate) fn execute(store: &Store, plan: &Plan, shape: &CountShape<'_>) -> Result<Vec<Vec<Option<Term>>>, EngineError> {
    let n = store.version_count() as usize;
    let mut rows_per_version = vec![0u64; n];
    let mut counts = vec![0u64; n];
    let mut ev = Evaluator::new(store, plan.variables.len());
    let always_bound = shape.argument == shape.graph_var || shape.argument == shape.version_var;
    for r in ev.condensed(shape.inner)? {
        r.versions.accumulate_into(&mut rows_per_version);
        if always_bound || r.solution[shape.argument].is_some() {
            r.versions.accumulate_into(&mut counts);
        }
    }
    let mut out = Vec::new();
    for (i, (&rows, &count)) in rows_per_version.iter().zip(&counts).enumerate() {
        if rows == 0 {
            continue;
        }
        let version = vocab::version_iri(VersionOrdinal::from_bit_index(i));
        let row = plan
            .root
            .columns
            .iter()
            .map(|c| match c {
                Column::Var(_) => Some(version.clone()),
                Column::Aggregate(_) => Some(Term::integer(count)),
            })
            .collect();
        out.push(row);
    }
    Ok(out)
}
