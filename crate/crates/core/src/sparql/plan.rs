//! Normalised algebra: absolute IRIs, `a` and `/` paths desugared, variables
//! numbered by first appearance.

use std::collections::{BTreeSet, HashMap};

use super::ast::{self, AggregateFunction, AstTerm, Pattern, Predicate, Projection, Query, Select};
use super::SparqlError;
use crate::term::{Literal, Term};
use crate::vocab::RDF_TYPE;

pub type VarId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    /// Variable names indexed by [`VarId`]. Path intermediates are named
    /// `#path{n}`, which no query can spell.
    pub variables: Vec<String>,
    pub root: SelectPlan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectPlan {
    pub columns: Vec<Column>,
    pub pattern: PatternPlan,
    pub group_by: Option<Vec<VarId>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Var(VarId),
    Aggregate(AggregatePlan),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregatePlan {
    pub function: AggregateFunction,
    pub argument: VarId,
    pub output: VarId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternPlan {
    Bgp(Vec<TriplePlan>),
    Graph(PlanTerm, Box<PatternPlan>),
    Join(Vec<PatternPlan>),
    Minus(Box<PatternPlan>, Box<PatternPlan>),
    SubSelect(Box<SelectPlan>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PlanTerm {
    Var(VarId),
    Const(Term),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePlan {
    pub subject: PlanTerm,
    pub predicate: PlanTerm,
    pub object: PlanTerm,
}

impl Column {
    pub fn output(&self) -> VarId {
        match self {
            Column::Var(v) => *v,
            Column::Aggregate(a) => a.output,
        }
    }
}

impl SelectPlan {
    pub fn outputs(&self) -> Vec<VarId> {
        self.columns.iter().map(Column::output).collect()
    }

    /// True when evaluation groups rows (explicit GROUP BY or aggregates).
    pub fn is_grouped(&self) -> bool {
        self.group_by.is_some() || self.columns.iter().any(|c| matches!(c, Column::Aggregate(_)))
    }
}

impl PlanTerm {
    pub fn var(&self) -> Option<VarId> {
        match self {
            PlanTerm::Var(v) => Some(*v),
            PlanTerm::Const(_) => None,
        }
    }
}

impl TriplePlan {
    pub fn terms(&self) -> [&PlanTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

impl PatternPlan {
    /// True if `var` occurs anywhere inside, including nested sub-selects.
    pub fn mentions(&self, var: VarId) -> bool {
        match self {
            PatternPlan::Bgp(ts) => ts.iter().any(|t| t.terms().iter().any(|x| x.var() == Some(var))),
            PatternPlan::Graph(target, inner) => target.var() == Some(var) || inner.mentions(var),
            PatternPlan::Join(cs) => cs.iter().any(|c| c.mentions(var)),
            PatternPlan::Minus(l, r) => l.mentions(var) || r.mentions(var),
            PatternPlan::SubSelect(s) => {
                s.pattern.mentions(var)
                    || s.columns.iter().any(|c| match c {
                        Column::Var(v) => *v == var,
                        Column::Aggregate(a) => a.argument == var || a.output == var,
                    })
            }
        }
    }

    /// In-scope variables, by the same rules as [`Pattern::visible_vars`].
    pub fn visible(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_visible(&mut out);
        out
    }

    fn collect_visible(&self, out: &mut BTreeSet<VarId>) {
        match self {
            PatternPlan::Bgp(ts) => out.extend(ts.iter().flat_map(|t| t.terms().into_iter().filter_map(PlanTerm::var))),
            PatternPlan::Graph(target, inner) => {
                out.extend(target.var());
                inner.collect_visible(out);
            }
            PatternPlan::Join(cs) => cs.iter().for_each(|c| c.collect_visible(out)),
            PatternPlan::Minus(l, _) => l.collect_visible(out),
            PatternPlan::SubSelect(s) => out.extend(s.outputs()),
        }
    }
}

impl Plan {
    pub fn column_names(&self) -> Vec<&str> {
        self.root.outputs().into_iter().map(|v| self.variables[v].as_str()).collect()
    }

    /// Tree form of the plan: absolute IRIs, no prefixes, explicit aliases.
    /// Validating it again yields an equal plan.
    pub fn to_ast(&self) -> Query {
        Query {
            prefixes: Vec::new(),
            select: self.select_ast(&self.root),
        }
    }

    fn name(&self, v: VarId) -> String {
        self.variables[v].clone()
    }

    fn term_ast(&self, t: &PlanTerm) -> AstTerm {
        match t {
            PlanTerm::Var(v) => AstTerm::Var(self.name(*v)),
            PlanTerm::Const(Term::Iri(i)) => AstTerm::Iri(i.clone()),
            PlanTerm::Const(Term::Literal(l)) => AstTerm::Literal(l.clone()),
            PlanTerm::Const(Term::BlankNode(_)) => unreachable!("plans never hold blank nodes"),
        }
    }

    fn select_ast(&self, s: &SelectPlan) -> Select {
        Select {
            projection: s
                .columns
                .iter()
                .map(|c| match c {
                    Column::Var(v) => Projection::Var(self.name(*v)),
                    Column::Aggregate(a) => Projection::Aggregate {
                        function: a.function,
                        argument: self.name(a.argument),
                        alias: Some(self.name(a.output)),
                    },
                })
                .collect(),
            pattern: self.pattern_ast(&s.pattern),
            group_by: s
                .group_by
                .as_ref()
                .map(|g| g.iter().map(|v| self.name(*v)).collect()),
        }
    }

    fn pattern_ast(&self, p: &PatternPlan) -> Pattern {
        match p {
            PatternPlan::Bgp(ts) => Pattern::Bgp(
                ts.iter()
                    .map(|t| ast::TriplePattern {
                        subject: self.term_ast(&t.subject),
                        predicate: Predicate::Term(self.term_ast(&t.predicate)),
                        object: self.term_ast(&t.object),
                    })
                    .collect(),
            ),
            PatternPlan::Graph(t, inner) => Pattern::Graph(self.term_ast(t), Box::new(self.pattern_ast(inner))),
            PatternPlan::Join(cs) => Pattern::Join(cs.iter().map(|c| self.pattern_ast(c)).collect()),
            PatternPlan::Minus(l, r) => Pattern::Minus(Box::new(self.pattern_ast(l)), Box::new(self.pattern_ast(r))),
            PatternPlan::SubSelect(s) => Pattern::SubSelect(Box::new(self.select_ast(s))),
        }
    }
}

pub fn validate_and_name(query: &Query) -> Result<Plan, SparqlError> {
    let mut namer = Namer {
        prefixes: query.prefixes.iter().cloned().collect(),
        names: Vec::new(),
        index: HashMap::new(),
        taken: ast::all_var_names(&query.select),
        paths: 0,
    };
    let root = namer.select(&query.select)?;
    Ok(Plan {
        variables: namer.names,
        root,
    })
}

struct Namer {
    prefixes: HashMap<String, String>,
    names: Vec<String>,
    index: HashMap<String, VarId>,
    /// Names unavailable for automatic aggregate aliases.
    taken: BTreeSet<String>,
    paths: usize,
}

impl Namer {
    fn var(&mut self, name: &str) -> VarId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    fn fresh_path_var(&mut self) -> VarId {
        let name = format!("#path{}", self.paths);
        self.paths += 1;
        self.var(&name)
    }

    fn auto_alias(&mut self, next: &mut usize) -> String {
        loop {
            let name = format!("agg{next}");
            *next += 1;
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }

    fn select(&mut self, s: &Select) -> Result<SelectPlan, SparqlError> {
        let pattern = self.pattern(&s.pattern)?;
        let visible = s.pattern.visible_vars();
        let mut next_alias = 1;
        let mut columns = Vec::with_capacity(s.projection.len());
        for p in &s.projection {
            columns.push(match p {
                Projection::Var(v) => Column::Var(self.var(v)),
                Projection::Aggregate {
                    function,
                    argument,
                    alias,
                } => {
                    let argument = self.var(argument);
                    let alias = match alias {
                        Some(a) => a.clone(),
                        None => self.auto_alias(&mut next_alias),
                    };
                    Column::Aggregate(AggregatePlan {
                        function: *function,
                        argument,
                        output: self.var(&alias),
                    })
                }
            });
        }
        let group_by = match &s.group_by {
            None => None,
            Some(keys) => Some(
                keys.iter()
                    .map(|k| {
                        if visible.contains(k) {
                            Ok(self.var(k))
                        } else {
                            Err(SparqlError::GroupByNotVisible(k.clone()))
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        Ok(SelectPlan {
            columns,
            pattern,
            group_by,
        })
    }

    fn pattern(&mut self, p: &Pattern) -> Result<PatternPlan, SparqlError> {
        Ok(match p {
            Pattern::Bgp(triples) => {
                let mut out = Vec::with_capacity(triples.len());
                for t in triples {
                    let subject = self.term(&t.subject)?;
                    match &t.predicate {
                        Predicate::Term(p) => {
                            let predicate = self.term(p)?;
                            let object = self.term(&t.object)?;
                            out.push(TriplePlan {
                                subject,
                                predicate,
                                object,
                            });
                        }
                        Predicate::Path(steps) => {
                            // s p1/p2/p3 o  =>  s p1 #a . #a p2 #b . #b p3 o
                            let mut current = subject;
                            for step in &steps[..steps.len() - 1] {
                                let predicate = self.term(step)?;
                                let next = PlanTerm::Var(self.fresh_path_var());
                                out.push(TriplePlan {
                                    subject: current,
                                    predicate,
                                    object: next.clone(),
                                });
                                current = next;
                            }
                            let predicate = self.term(steps.last().expect("paths have two or more steps"))?;
                            let object = self.term(&t.object)?;
                            out.push(TriplePlan {
                                subject: current,
                                predicate,
                                object,
                            });
                        }
                    }
                }
                PatternPlan::Bgp(out)
            }
            Pattern::Graph(target, inner) => {
                let target = self.term(target)?;
                PatternPlan::Graph(target, Box::new(self.pattern(inner)?))
            }
            Pattern::Join(children) => {
                PatternPlan::Join(children.iter().map(|c| self.pattern(c)).collect::<Result<_, _>>()?)
            }
            Pattern::Minus(l, r) => {
                let l = self.pattern(l)?;
                PatternPlan::Minus(Box::new(l), Box::new(self.pattern(r)?))
            }
            Pattern::SubSelect(s) => PatternPlan::SubSelect(Box::new(self.select(s)?)),
        })
    }

    fn expand(&self, prefix: &str, local: &str) -> Result<String, SparqlError> {
        self.prefixes
            .get(prefix)
            .map(|ns| format!("{ns}{local}"))
            .ok_or_else(|| SparqlError::UnknownPrefix {
                line: 0,
                column: 0,
                prefix: prefix.to_owned(),
            })
    }

    fn term(&mut self, t: &AstTerm) -> Result<PlanTerm, SparqlError> {
        let invalid = |e: crate::term::TermError| SparqlError::InvalidTerm(e.to_string());
        Ok(match t {
            AstTerm::Var(v) => PlanTerm::Var(self.var(v)),
            AstTerm::Iri(i) => PlanTerm::Const(Term::iri(i.clone()).map_err(invalid)?),
            AstTerm::Prefixed { prefix, local } => {
                PlanTerm::Const(Term::iri(self.expand(prefix, local)?).map_err(invalid)?)
            }
            AstTerm::RdfType => PlanTerm::Const(Term::Iri(RDF_TYPE.to_owned())),
            AstTerm::Literal(l) => PlanTerm::Const(Term::Literal(l.clone())),
            AstTerm::PrefixedTypedLiteral { lexical, prefix, local } => PlanTerm::Const(Term::Literal(
                Literal::typed(lexical.clone(), self.expand(prefix, local)?).map_err(invalid)?,
            )),
        })
    }
}
