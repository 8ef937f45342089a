//! RDF terms, triples and quads.
//!
//! Terms compare syntactically: two literals are equal only when their
//! lexical form, datatype and language tag all match. `"1"^^xsd:int` and
//! `"01"^^xsd:int` are different terms even though they denote the same value.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::numeric::Number;
use crate::vocab::RDF_LANG_STRING;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("IRI must not be empty")]
    EmptyIri,
    #[error("IRI <{0}> contains whitespace or angle brackets")]
    InvalidIri(String),
    #[error("blank node label must not be empty")]
    EmptyBlankNode,
    #[error("invalid blank node label `{0}`")]
    InvalidBlankNode(String),
    #[error("invalid language tag `{0}`")]
    InvalidLanguage(String),
    #[error("literal cannot carry both a datatype and a language tag")]
    DatatypeAndLanguage,
    #[error("{position} must be {expected}")]
    Position {
        position: &'static str,
        expected: &'static str,
    },
}

/// A literal value. `datatype` and `language` are mutually exclusive; a
/// language-tagged literal has the implicit datatype `rdf:langString`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Option<String>,
    language: Option<String>,
}

impl Literal {
    pub fn simple(lexical: impl Into<String>) -> Self {
        Self {
            lexical: lexical.into(),
            datatype: None,
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Result<Self, TermError> {
        let datatype = datatype.into();
        check_iri(&datatype)?;
        Ok(Self {
            lexical: lexical.into(),
            datatype: Some(datatype),
            language: None,
        })
    }

    /// The language tag is lower-cased; tags compare case-insensitively.
    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Result<Self, TermError> {
        let language = language.into();
        if !is_valid_language(&language) {
            return Err(TermError::InvalidLanguage(language));
        }
        Ok(Self {
            lexical: lexical.into(),
            datatype: None,
            language: Some(language.to_ascii_lowercase()),
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    /// Explicit datatype, if one was written.
    pub fn datatype(&self) -> Option<&str> {
        self.datatype.as_deref()
    }

    /// Datatype after applying the implicit `rdf:langString` rule.
    pub fn effective_datatype(&self) -> Option<&str> {
        match (&self.datatype, &self.language) {
            (Some(dt), _) => Some(dt),
            (None, Some(_)) => Some(RDF_LANG_STRING),
            (None, None) => None,
        }
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    /// Numeric value, when the literal is numeric-typed or a plain literal
    /// with numeric lexical form.
    pub fn numeric_value(&self) -> Option<Number> {
        if self.language.is_some() {
            return None;
        }
        match self.datatype.as_deref() {
            None => Number::parse(&self.lexical),
            Some(dt) if crate::vocab::is_xsd_string(dt) => Number::parse(&self.lexical),
            Some(dt) if crate::vocab::is_xsd_numeric(dt) => Number::parse(&self.lexical),
            Some(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(String),
    BlankNode(String),
    Literal(Literal),
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Result<Self, TermError> {
        let iri = iri.into();
        check_iri(&iri)?;
        Ok(Term::Iri(iri))
    }

    pub fn blank(label: impl Into<String>) -> Result<Self, TermError> {
        let label = label.into();
        if label.is_empty() {
            return Err(TermError::EmptyBlankNode);
        }
        if !is_valid_blank_label(&label) {
            return Err(TermError::InvalidBlankNode(label));
        }
        Ok(Term::BlankNode(label))
    }

    pub fn literal(literal: Literal) -> Self {
        Term::Literal(literal)
    }

    pub fn simple_literal(lexical: impl Into<String>) -> Self {
        Term::Literal(Literal::simple(lexical))
    }

    pub fn typed_literal(lexical: impl Into<String>, datatype: impl Into<String>) -> Result<Self, TermError> {
        Literal::typed(lexical, datatype).map(Term::Literal)
    }

    pub fn integer(value: u64) -> Self {
        Term::Literal(Literal {
            lexical: value.to_string(),
            datatype: Some(crate::vocab::XSD_INTEGER.to_owned()),
            language: None,
        })
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::BlankNode(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    fn kind_rank(&self) -> u8 {
        match self {
            Term::BlankNode(_) => 0,
            Term::Iri(_) => 1,
            Term::Literal(_) => 2,
        }
    }
}

pub(crate) fn check_iri(iri: &str) -> Result<(), TermError> {
    if iri.is_empty() {
        return Err(TermError::EmptyIri);
    }
    if iri
        .chars()
        .any(|c| c.is_whitespace() || c == '<' || c == '>' || c.is_control())
    {
        return Err(TermError::InvalidIri(iri.to_owned()));
    }
    Ok(())
}

fn is_valid_language(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let Some(primary) = parts.next() else {
        return false;
    };
    if primary.is_empty() || primary.len() > 8 || !primary.chars().all(|c| c.is_ascii_alphabetic()) {
        return false;
    }
    parts.all(|p| !p.is_empty() && p.len() <= 8 && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

fn is_valid_blank_label(label: &str) -> bool {
    let mut chars = label.chars();
    let first = chars.next().unwrap();
    if !(first.is_alphanumeric() || first == '_') {
        return false;
    }
    if label.ends_with('.') {
        return false;
    }
    chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '\u{00B7}'))
}

/// Total order used by MIN/MAX and ORDER-style comparisons.
///
/// Blank nodes sort before IRIs, IRIs before literals. Among literals,
/// numeric literals (numeric datatypes, or plain literals whose lexical form
/// is a number) sort before all other literals and compare by exact decimal
/// value; remaining ties and non-numeric literals compare by
/// (lexical, datatype, language) in codepoint order.
pub fn sparql_cmp(a: &Term, b: &Term) -> Ordering {
    match (a, b) {
        (Term::Literal(la), Term::Literal(lb)) => {
            let by_value = match (la.numeric_value(), lb.numeric_value()) {
                (Some(na), Some(nb)) => na.cmp(&nb),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => Ordering::Equal,
            };
            by_value.then_with(|| syntactic_literal_cmp(la, lb))
        }
        (Term::Iri(x), Term::Iri(y)) | (Term::BlankNode(x), Term::BlankNode(y)) => x.cmp(y),
        _ => a.kind_rank().cmp(&b.kind_rank()),
    }
}

fn syntactic_literal_cmp(a: &Literal, b: &Literal) -> Ordering {
    a.lexical
        .cmp(&b.lexical)
        .then_with(|| a.datatype.cmp(&b.datatype))
        .then_with(|| a.language.cmp(&b.language))
}

// ---------------------------------------------------------------------------
// N-Triples rendering
// ---------------------------------------------------------------------------

pub(crate) fn write_escaped(out: &mut impl fmt::Write, s: &str) -> fmt::Result {
    for c in s.chars() {
        match c {
            '"' => out.write_str("\\\"")?,
            '\\' => out.write_str("\\\\")?,
            '\n' => out.write_str("\\n")?,
            '\r' => out.write_str("\\r")?,
            c => out.write_char(c)?,
        }
    }
    Ok(())
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        write_escaped(f, &self.lexical)?;
        f.write_str("\"")?;
        if let Some(lang) = &self.language {
            write!(f, "@{lang}")?;
        } else if let Some(dt) = &self.datatype {
            write!(f, "^^<{dt}>")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::BlankNode(label) => write!(f, "_:{label}"),
            Term::Literal(lit) => lit.fmt(f),
        }
    }
}

// ---------------------------------------------------------------------------
// Triples and quads
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self, TermError> {
        if subject.is_literal() {
            return Err(TermError::Position {
                position: "subject",
                expected: "an IRI or blank node",
            });
        }
        if !predicate.is_iri() {
            return Err(TermError::Position {
                position: "predicate",
                expected: "an IRI",
            });
        }
        Ok(Self {
            subject,
            predicate,
            object,
        })
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// A triple plus an optional graph name; `None` is the default graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quad {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
    pub graph: Option<Term>,
}

impl Quad {
    pub fn new(subject: Term, predicate: Term, object: Term, graph: Option<Term>) -> Result<Self, TermError> {
        let Triple {
            subject,
            predicate,
            object,
        } = Triple::new(subject, predicate, object)?;
        if let Some(g) = &graph {
            if !g.is_iri() {
                return Err(TermError::Position {
                    position: "graph",
                    expected: "an IRI",
                });
            }
        }
        Ok(Self {
            subject,
            predicate,
            object,
            graph,
        })
    }

    pub fn triple(&self) -> Triple {
        Triple {
            subject: self.subject.clone(),
            predicate: self.predicate.clone(),
            object: self.object.clone(),
        }
    }
}

impl From<Triple> for Quad {
    fn from(t: Triple) -> Self {
        Quad {
            subject: t.subject,
            predicate: t.predicate,
            object: t.object,
            graph: None,
        }
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)?;
        if let Some(g) = &self.graph {
            write!(f, " {g}")?;
        }
        f.write_str(" .")
    }
}
