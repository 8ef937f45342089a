//! SPARQL subset: PREFIX, SELECT with COUNT/MAX/MIN/SUM aggregates, WHERE,
//! basic graph patterns, GRAPH, nested groups, MINUS, sub-SELECT and
//! GROUP BY. Everything else is rejected with an "unsupported operator" error.

pub mod ast;
mod lexer;
mod parser;
mod plan;
mod printer;
#[cfg(test)]
mod testgen;

use thiserror::Error;

pub use ast::{AggregateFunction, AstTerm, Pattern, Predicate, Projection, Query, Select, TriplePattern};
pub use parser::parse_query;
pub use plan::{validate_and_name, AggregatePlan, Column, PatternPlan, Plan, PlanTerm, SelectPlan, TriplePlan, VarId};

pub const SUPPORTED_SUBSET: &str =
    "PREFIX, SELECT, WHERE, GRAPH, MINUS, sub-SELECT, GROUP BY, COUNT, COUNT(DISTINCT), MAX, MIN, SUM";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparqlError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: unsupported operator {operator}; supported subset: {SUPPORTED_SUBSET}")]
    Unsupported { line: usize, column: usize, operator: String },
    #[error("{line}:{column}: unknown prefix `{prefix}:`")]
    UnknownPrefix { line: usize, column: usize, prefix: String },
    #[error("{line}:{column}: projected variable ?{variable} is not visible in the pattern")]
    NotVisible { line: usize, column: usize, variable: String },
    #[error("{line}:{column}: aggregate misuse: {message}")]
    AggregateMisuse { line: usize, column: usize, message: String },
    #[error("GROUP BY variable ?{0} is not visible in the pattern")]
    GroupByNotVisible(String),
    #[error("invalid term: {0}")]
    InvalidTerm(String),
}
