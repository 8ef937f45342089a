//! Surface syntax tree produced by the parser.

use std::collections::BTreeSet;

use crate::term::Literal;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    /// Declarations in source order; a later declaration shadows an earlier one.
    pub prefixes: Vec<(String, String)>,
    pub select: Select,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Select {
    pub projection: Vec<Projection>,
    pub pattern: Pattern,
    pub group_by: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    Var(String),
    Aggregate {
        function: AggregateFunction,
        argument: String,
        alias: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AggregateFunction {
    Count,
    CountDistinct,
    Max,
    Min,
    Sum,
}

impl AggregateFunction {
    pub fn keyword(self) -> &'static str {
        match self {
            AggregateFunction::Count | AggregateFunction::CountDistinct => "COUNT",
            AggregateFunction::Max => "MAX",
            AggregateFunction::Min => "MIN",
            AggregateFunction::Sum => "SUM",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    Bgp(Vec<TriplePattern>),
    Graph(AstTerm, Box<Pattern>),
    /// Always two or more children.
    Join(Vec<Pattern>),
    Minus(Box<Pattern>, Box<Pattern>),
    SubSelect(Box<Select>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: AstTerm,
    pub predicate: Predicate,
    pub object: AstTerm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    Term(AstTerm),
    /// `p1/p2/...`, two or more named steps.
    Path(Vec<AstTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AstTerm {
    Var(String),
    Iri(String),
    Prefixed { prefix: String, local: String },
    /// The `a` keyword.
    RdfType,
    Literal(Literal),
    /// `"lexical"^^prefix:local`, expanded during validation.
    PrefixedTypedLiteral { lexical: String, prefix: String, local: String },
}

impl AstTerm {
    pub fn var_name(&self) -> Option<&str> {
        match self {
            AstTerm::Var(v) => Some(v),
            _ => None,
        }
    }
}

impl Select {
    /// Names this select exposes to an enclosing pattern.
    pub fn output_names(&self) -> Vec<&str> {
        self.projection
            .iter()
            .filter_map(|p| match p {
                Projection::Var(v) => Some(v.as_str()),
                Projection::Aggregate { alias, .. } => alias.as_deref(),
            })
            .collect()
    }
}

impl Pattern {
    /// In-scope variables: everything a BGP or GRAPH mentions, the union over
    /// join children, the left side of MINUS, and a sub-select's projection.
    pub fn visible_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_visible(&mut out);
        out
    }

    fn collect_visible(&self, out: &mut BTreeSet<String>) {
        match self {
            Pattern::Bgp(triples) => {
                for t in triples {
                    for term in t.terms() {
                        if let Some(v) = term.var_name() {
                            out.insert(v.to_owned());
                        }
                    }
                }
            }
            Pattern::Graph(target, inner) => {
                if let Some(v) = target.var_name() {
                    out.insert(v.to_owned());
                }
                inner.collect_visible(out);
            }
            Pattern::Join(children) => children.iter().for_each(|c| c.collect_visible(out)),
            Pattern::Minus(left, _) => left.collect_visible(out),
            Pattern::SubSelect(select) => out.extend(select.output_names().into_iter().map(str::to_owned)),
        }
    }
}

impl TriplePattern {
    pub fn terms(&self) -> impl Iterator<Item = &AstTerm> {
        let predicate: Box<dyn Iterator<Item = &AstTerm>> = match &self.predicate {
            Predicate::Term(t) => Box::new(std::iter::once(t)),
            Predicate::Path(steps) => Box::new(steps.iter()),
        };
        std::iter::once(&self.subject).chain(predicate).chain(std::iter::once(&self.object))
    }
}

/// Every variable name appearing anywhere in the query, including inside
/// sub-selects and aggregate aliases.
pub fn all_var_names(select: &Select) -> BTreeSet<String> {
    fn walk_select(s: &Select, out: &mut BTreeSet<String>) {
        for p in &s.projection {
            match p {
                Projection::Var(v) => {
                    out.insert(v.clone());
                }
                Projection::Aggregate { argument, alias, .. } => {
                    out.insert(argument.clone());
                    out.extend(alias.clone());
                }
            }
        }
        out.extend(s.group_by.iter().flatten().cloned());
        walk_pattern(&s.pattern, out);
    }
    fn walk_pattern(p: &Pattern, out: &mut BTreeSet<String>) {
        match p {
            Pattern::Bgp(triples) => {
                for t in triples {
                    out.extend(t.terms().filter_map(AstTerm::var_name).map(str::to_owned));
                }
            }
            Pattern::Graph(target, inner) => {
                out.extend(target.var_name().map(str::to_owned));
                walk_pattern(inner, out);
            }
            Pattern::Join(children) => children.iter().for_each(|c| walk_pattern(c, out)),
            Pattern::Minus(l, r) => {
                walk_pattern(l, out);
                walk_pattern(r, out);
            }
            Pattern::SubSelect(s) => walk_select(s, out),
        }
    }
    let mut out = BTreeSet::new();
    walk_select(select, &mut out);
    out
}
