//! Pretty-printer whose output parses back to the same tree.
//!
//! Every join child is printed as its own braced group so that adjacent
//! BGPs are not merged on re-parse.

use std::fmt::{self, Write};

use super::ast::*;
use crate::term::write_escaped;

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (prefix, iri) in &self.prefixes {
            writeln!(f, "PREFIX {prefix}: <{iri}>")?;
        }
        write_select(f, &self.select, 0)?;
        f.write_char('\n')
    }
}

impl fmt::Display for AstTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AstTerm::Var(v) => write!(f, "?{v}"),
            AstTerm::Iri(iri) => write!(f, "<{iri}>"),
            AstTerm::Prefixed { prefix, local } => write!(f, "{prefix}:{local}"),
            AstTerm::RdfType => f.write_str("a"),
            AstTerm::Literal(lit) => write!(f, "{lit}"),
            AstTerm::PrefixedTypedLiteral { lexical, prefix, local } => {
                f.write_char('"')?;
                write_escaped(f, lexical)?;
                write!(f, "\"^^{prefix}:{local}")
            }
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Term(t) => t.fmt(f),
            Predicate::Path(steps) => {
                for (i, s) in steps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" / ")?;
                    }
                    s.fmt(f)?;
                }
                Ok(())
            }
        }
    }
}

fn indent(f: &mut impl Write, level: usize) -> fmt::Result {
    for _ in 0..level {
        f.write_str("  ")?;
    }
    Ok(())
}

fn write_select(f: &mut impl Write, s: &Select, level: usize) -> fmt::Result {
    f.write_str("SELECT")?;
    for p in &s.projection {
        match p {
            Projection::Var(v) => write!(f, " ?{v}")?,
            Projection::Aggregate {
                function,
                argument,
                alias,
            } => {
                let distinct = if *function == AggregateFunction::CountDistinct {
                    "DISTINCT "
                } else {
                    ""
                };
                let call = format!("{}({distinct}?{argument})", function.keyword());
                match alias {
                    Some(a) => write!(f, " ({call} AS ?{a})")?,
                    None => write!(f, " {call}")?,
                }
            }
        }
    }
    f.write_str(" WHERE ")?;
    write_group(f, &s.pattern, level)?;
    if let Some(keys) = &s.group_by {
        f.write_str(" GROUP BY")?;
        for k in keys {
            write!(f, " ?{k}")?;
        }
    }
    Ok(())
}

fn write_group(f: &mut impl Write, p: &Pattern, level: usize) -> fmt::Result {
    f.write_str("{\n")?;
    match p {
        Pattern::Bgp(triples) => {
            for t in triples {
                indent(f, level + 1)?;
                writeln!(f, "{} {} {} .", t.subject, t.predicate, t.object)?;
            }
        }
        Pattern::Graph(target, inner) => {
            indent(f, level + 1)?;
            write!(f, "GRAPH {target} ")?;
            write_group(f, inner, level + 1)?;
            f.write_char('\n')?;
        }
        Pattern::Join(children) => {
            for c in children {
                indent(f, level + 1)?;
                write_group(f, c, level + 1)?;
                f.write_char('\n')?;
            }
        }
        Pattern::Minus(l, r) => {
            indent(f, level + 1)?;
            write_group(f, l, level + 1)?;
            f.write_str(" MINUS ")?;
            write_group(f, r, level + 1)?;
            f.write_char('\n')?;
        }
        Pattern::SubSelect(s) => {
            indent(f, level + 1)?;
            write_select(f, s, level + 1)?;
            f.write_char('\n')?;
        }
    }
    indent(f, level)?;
    f.write_char('}')
}
