//! N-Quads reading and writing.
//!
//! One statement per line: `subject predicate object [graph] .` with IRIs in
//! angle brackets, blank nodes as `_:label`, and literals with an optional
//! `^^<datatype>` or `@lang` suffix. Lines whose first non-blank character is
//! `#` are comments.

use std::io::{self, Write};

use thiserror::Error;

use crate::term::{Literal, Quad, Term, TermError, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    /// Abort on the first malformed line.
    Strict,
    /// Skip malformed lines, recording a warning for each.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

/// Quads in file order, plus warnings from lenient parsing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedDocument {
    pub quads: Vec<Quad>,
    pub warnings: Vec<ParseWarning>,
    line_numbers: Vec<usize>,
}

impl ParsedDocument {
    /// Builds a document from in-memory quads; quad `i` is reported as line `i + 1`.
    pub fn from_quads(quads: Vec<Quad>) -> Self {
        let line_numbers = (1..=quads.len()).collect();
        Self {
            quads,
            warnings: Vec::new(),
            line_numbers,
        }
    }

    /// Source line of the `index`-th quad.
    pub fn line_of(&self, index: usize) -> usize {
        self.line_numbers.get(index).copied().unwrap_or(index + 1)
    }

    /// Version data must be graph-scoped: the default graph holds metadata only.
    pub fn require_named_graphs(&self) -> Result<(), ParseError> {
        match self.quads.iter().position(|q| q.graph.is_none()) {
            Some(i) => Err(ParseError {
                line: self.line_of(i),
                column: 1,
                message: "default-graph quad in version data; every quad needs a named graph".into(),
            }),
            None => Ok(()),
        }
    }
}

pub fn parse_nquads(input: &[u8], mode: ParseMode) -> Result<ParsedDocument, ParseError> {
    let mut doc = ParsedDocument::default();
    for (idx, raw) in input.split(|&b| b == b'\n').enumerate() {
        let line_no = idx + 1;
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        let result = match std::str::from_utf8(raw) {
            Ok(line) => parse_line(line, true),
            Err(e) => Err((
                String::from_utf8_lossy(&raw[..e.valid_up_to()]).chars().count() + 1,
                "invalid UTF-8".to_owned(),
            )),
        };
        match result {
            Ok(Some(quad)) => {
                doc.quads.push(quad);
                doc.line_numbers.push(line_no);
            }
            Ok(None) => {}
            Err((column, message)) => match mode {
                ParseMode::Strict => {
                    return Err(ParseError {
                        line: line_no,
                        column,
                        message,
                    })
                }
                ParseMode::Lenient => doc.warnings.push(ParseWarning {
                    line: line_no,
                    message: format!("column {column}: {message}"),
                }),
            },
        }
    }
    Ok(doc)
}

/// Parses one N-Triples line (no graph term allowed).
pub fn parse_ntriples_line(line: &str) -> Result<Option<Triple>, ParseError> {
    match parse_line(line, false) {
        Ok(q) => Ok(q.map(|q| q.triple())),
        Err((column, message)) => Err(ParseError {
            line: 1,
            column,
            message,
        }),
    }
}

/// Parses a single term in N-Triples syntax, e.g. `<urn:a>` or `"1"^^<urn:dt>`.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(text);
    let to_err = |(column, message)| ParseError {
        line: 1,
        column,
        message,
    };
    let term = cur.term().map_err(to_err)?;
    cur.skip_ws();
    if !cur.at_end() {
        return Err(to_err(cur.err("trailing characters after term")));
    }
    Ok(term)
}

pub fn serialize_nquads(quads: &[Quad]) -> Vec<u8> {
    let mut out = Vec::new();
    write_nquads(&mut out, quads).expect("writing to a Vec cannot fail");
    out
}

pub fn write_nquads<W: Write>(mut w: W, quads: &[Quad]) -> io::Result<()> {
    for q in quads {
        writeln!(w, "{q}")?;
    }
    Ok(())
}

type LineResult<T> = Result<T, (usize, String)>;

fn parse_line(line: &str, allow_graph: bool) -> LineResult<Option<Quad>> {
    let mut cur = Cursor::new(line);
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let start = cur.column();
    let subject = cur.term()?;
    cur.skip_ws();
    let pred_col = cur.column();
    let predicate = cur.term()?;
    cur.skip_ws();
    let object = cur.term()?;
    cur.skip_ws();
    let mut graph = None;
    let graph_col = cur.column();
    if !cur.at_end() && cur.peek() != Some('.') {
        if !allow_graph {
            return Err(cur.err("expected '.'"));
        }
        graph = Some(cur.term()?);
        cur.skip_ws();
    }
    if !cur.eat('.') {
        return Err(cur.err("expected '.'"));
    }
    cur.skip_ws();
    if !cur.at_end() && cur.peek() != Some('#') {
        return Err(cur.err("unexpected content after '.'"));
    }
    Quad::new(subject, predicate, object, graph).map(Some).map_err(|e| {
        let column = match &e {
            TermError::Position { position: "predicate", .. } => pred_col,
            TermError::Position { position: "graph", .. } => graph_col,
            _ => start,
        };
        (column, e.to_string())
    })
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Self { text, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.text.len()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    /// 1-based column in characters.
    fn column(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn err<T: Into<String>>(&self, msg: T) -> (usize, String) {
        (self.column(), msg.into())
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn term(&mut self) -> LineResult<Term> {
        let col = self.column();
        match self.peek() {
            Some('<') => {
                let iri = self.iri_ref()?;
                Term::iri(iri).map_err(|e| (col, e.to_string()))
            }
            Some('_') => self.blank(),
            Some('"') => self.literal(),
            Some(c) => Err(self.err(format!("unexpected character '{c}'"))),
            None => Err(self.err("unexpected end of line")),
        }
    }

    fn iri_ref(&mut self) -> LineResult<String> {
        let open = self.column();
        self.bump();
        let mut iri = String::new();
        loop {
            match self.bump() {
                None => return Err((open, "unterminated IRI".into())),
                Some('>') => break,
                Some('\\') => {
                    let c = self.uchar()?;
                    iri.push(c);
                }
                Some(c) if c <= ' ' || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err((self.column() - 1, format!("invalid character {c:?} in IRI")));
                }
                Some(c) => iri.push(c),
            }
        }
        if iri.is_empty() {
            return Err((open, "empty IRI".into()));
        }
        Ok(iri)
    }

    fn uchar(&mut self) -> LineResult<char> {
        let col = self.column() - 1;
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err((col, "invalid escape in IRI".into())),
        };
        self.hex_char(len, col)
    }

    fn hex_char(&mut self, len: usize, col: usize) -> LineResult<char> {
        let digits = self.rest().get(..len).filter(|d| d.bytes().all(|b| b.is_ascii_hexdigit()));
        let Some(digits) = digits else {
            return Err((col, format!("expected {len} hex digits in escape")));
        };
        self.pos += len;
        u32::from_str_radix(digits, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or((col, format!("escape \\{digits} is not a valid code point")))
    }

    fn blank(&mut self) -> LineResult<Term> {
        let col = self.column();
        if !self.rest().starts_with("_:") {
            return Err(self.err("expected '_:'"));
        }
        self.pos += 2;
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '\u{00B7}') {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        // a trailing '.' terminates the statement, not the label
        while self.text[start..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        Term::blank(&self.text[start..self.pos]).map_err(|e| (col, e.to_string()))
    }

    fn literal(&mut self) -> LineResult<Term> {
        let open = self.column();
        self.bump();
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return Err((open, "unterminated literal".into())),
                Some('"') => break,
                Some('\\') => {
                    let col = self.column() - 1;
                    match self.bump() {
                        Some('t') => lexical.push('\t'),
                        Some('n') => lexical.push('\n'),
                        Some('r') => lexical.push('\r'),
                        Some('"') => lexical.push('"'),
                        Some('\\') => lexical.push('\\'),
                        Some('u') => lexical.push(self.hex_char(4, col)?),
                        Some('U') => lexical.push(self.hex_char(8, col)?),
                        Some(c) => return Err((col, format!("unsupported escape '\\{c}'"))),
                        None => return Err((col, "unterminated escape".into())),
                    }
                }
                Some('\n' | '\r') => return Err(self.err("raw line break in literal")),
                Some(c) => lexical.push(c),
            }
        }
        let suffix_col = self.column();
        if self.rest().starts_with("^^") {
            self.pos += 2;
            if self.peek() != Some('<') {
                return Err(self.err("expected datatype IRI after '^^'"));
            }
            let dt = self.iri_ref()?;
            return Literal::typed(lexical, dt)
                .map(Term::Literal)
                .map_err(|e| (suffix_col, e.to_string()));
        }
        if self.eat('@') {
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                self.pos += 1;
            }
            return Literal::lang(lexical, &self.text[start..self.pos])
                .map(Term::Literal)
                .map_err(|e| (suffix_col, e.to_string()));
        }
        Ok(Term::Literal(Literal::simple(lexical)))
    }
}
