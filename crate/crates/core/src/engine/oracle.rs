//! Reference evaluator over the flat model.
//!
//! Nested loops over the exported quad list, term-valued bindings, no
//! dictionary, indexes or bitmaps. Shares nothing with the main engine beyond
//! the plan types and term comparison, so agreement between the two is a
//! meaningful check.

use std::collections::HashSet;

use indexmap::IndexMap;

use super::{sum_term, EngineError, ResultTable};
use crate::numeric::Number;
use crate::sparql::{AggregateFunction, Column, PatternPlan, Plan, PlanTerm, SelectPlan, TriplePlan};
use crate::term::{sparql_cmp, Quad, Term};
use crate::vocab;

type Row = Vec<Option<Term>>;

pub fn evaluate_oracle(flat: &[Quad], plan: &Plan) -> Result<ResultTable, EngineError> {
    let o = Oracle {
        flat,
        width: plan.variables.len(),
    };
    let rows = o.select(&plan.root, None)?;
    let outputs = plan.root.outputs();
    let rows = rows
        .into_iter()
        .map(|r| outputs.iter().map(|&v| r[v].clone()).collect())
        .collect();
    let columns = plan.column_names().into_iter().map(str::to_owned).collect();
    Ok(ResultTable::new(columns, rows))
}

struct Oracle<'a> {
    flat: &'a [Quad],
    width: usize,
}

impl Oracle<'_> {
    fn select(&self, s: &SelectPlan, active: Option<&Term>) -> Result<Vec<Row>, EngineError> {
        let rows = self.eval(&s.pattern, active)?;
        let outputs = s.outputs();
        let keep = |r: &Row| -> Row { (0..self.width).map(|v| if outputs.contains(&v) { r[v].clone() } else { None }).collect() };
        if !s.is_grouped() {
            return Ok(rows.iter().map(keep).collect());
        }
        let keys = s.group_by.clone().unwrap_or_default();
        let mut groups: IndexMap<Vec<Option<Term>>, Vec<&Row>> = IndexMap::new();
        for r in &rows {
            groups.entry(keys.iter().map(|&k| r[k].clone()).collect()).or_default().push(r);
        }
        if rows.is_empty() && s.group_by.is_none() {
            groups.insert(Vec::new(), Vec::new());
        }
        let mut out = Vec::new();
        for (key, members) in groups {
            let mut row: Row = vec![None; self.width];
            for (&k, v) in keys.iter().zip(&key) {
                row[k] = v.clone();
            }
            for c in &s.columns {
                if let Column::Aggregate(a) = c {
                    let values: Vec<&Term> = members.iter().filter_map(|m| m[a.argument].as_ref()).collect();
                    row[a.output] = aggregate(a.function, &values, &key)?;
                }
            }
            out.push(keep(&row));
        }
        Ok(out)
    }

    fn eval(&self, p: &PatternPlan, active: Option<&Term>) -> Result<Vec<Row>, EngineError> {
        match p {
            PatternPlan::Bgp(triples) => Ok(self.bgp(triples, active)),
            PatternPlan::Graph(PlanTerm::Const(g), inner) => {
                if self.vng_names().contains(&g) {
                    self.eval(inner, Some(g))
                } else {
                    Ok(Vec::new())
                }
            }
            PatternPlan::Graph(PlanTerm::Var(v), inner) => {
                let mut out = Vec::new();
                for g in self.vng_names() {
                    for mut r in self.eval(inner, Some(g))? {
                        match &r[*v] {
                            Some(x) if x != g => {}
                            _ => {
                                r[*v] = Some(g.clone());
                                out.push(r);
                            }
                        }
                    }
                }
                Ok(out)
            }
            PatternPlan::Join(children) => {
                let mut acc = vec![vec![None; self.width]];
                for c in children {
                    let right = self.eval(c, active)?;
                    let mut next = Vec::new();
                    for l in &acc {
                        for r in &right {
                            if compatible(l, r) {
                                next.push(l.iter().zip(r).map(|(x, y)| x.clone().or_else(|| y.clone())).collect());
                            }
                        }
                    }
                    acc = next;
                }
                Ok(acc)
            }
            PatternPlan::Minus(l, r) => {
                let left = self.eval(l, active)?;
                let right = self.eval(r, active)?;
                Ok(left
                    .into_iter()
                    .filter(|l| {
                        !right.iter().any(|r| {
                            compatible(l, r) && l.iter().zip(r).any(|(x, y)| x.is_some() && y.is_some())
                        })
                    })
                    .collect())
            }
            PatternPlan::SubSelect(s) => self.select(s, active),
        }
    }

    /// Distinct graph names that are vng IRIs, in first-seen order.
    fn vng_names(&self) -> Vec<&Term> {
        let mut seen = HashSet::new();
        self.flat
            .iter()
            .filter_map(|q| q.graph.as_ref())
            .filter(|g| g.as_iri().and_then(vocab::parse_vng_counter).is_some())
            .filter(|g| seen.insert(*g))
            .collect()
    }

    fn bgp(&self, triples: &[TriplePlan], active: Option<&Term>) -> Vec<Row> {
        let mut rows = vec![vec![None; self.width]];
        for t in triples {
            let mut next = Vec::new();
            for row in &rows {
                for q in self.flat.iter().filter(|q| q.graph.as_ref() == active) {
                    let mut r = row.clone();
                    let ok = t
                        .terms()
                        .into_iter()
                        .zip([&q.subject, &q.predicate, &q.object])
                        .all(|(pt, value)| match pt {
                            PlanTerm::Const(c) => c == value,
                            PlanTerm::Var(v) => match &r[*v] {
                                Some(x) => x == value,
                                None => {
                                    r[*v] = Some(value.clone());
                                    true
                                }
                            },
                        });
                    if ok {
                        next.push(r);
                    }
                }
            }
            rows = next;
        }
        rows
    }
}

fn compatible(a: &Row, b: &Row) -> bool {
    a.iter().zip(b).all(|(x, y)| match (x, y) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    })
}

fn aggregate(f: AggregateFunction, values: &[&Term], key: &[Option<Term>]) -> Result<Option<Term>, EngineError> {
    Ok(match f {
        AggregateFunction::Count => Some(Term::integer(values.len() as u64)),
        AggregateFunction::CountDistinct => {
            let distinct: HashSet<&Term> = values.iter().copied().collect();
            Some(Term::integer(distinct.len() as u64))
        }
        AggregateFunction::Max => values.iter().copied().max_by(|a, b| sparql_cmp(a, b)).cloned(),
        AggregateFunction::Min => values.iter().copied().min_by(|a, b| sparql_cmp(a, b)).cloned(),
        AggregateFunction::Sum => {
            let mut total = Number::zero();
            for v in values {
                match v.as_literal().and_then(|l| l.numeric_value()) {
                    Some(n) => total = total.add(&n),
                    None => {
                        let group = key
                            .iter()
                            .map(|k| k.as_ref().map_or("UNDEF".to_owned(), Term::to_string))
                            .collect::<Vec<_>>()
                            .join(" ");
                        return Err(EngineError::NonNumericSum {
                            group,
                            value: v.to_string(),
                        });
                    }
                }
            }
            Some(sum_term(&total))
        }
    })
}
