use std::fmt;

use super::SparqlError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    IriRef(String),
    PName { prefix: String, local: String },
    Var(String),
    Str(String),
    LangTag(String),
    Number { lexical: String, datatype: &'static str },
    /// Bare word: keywords, `a`, `true`, `false`.
    Word(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Dot,
    Semi,
    Comma,
    Slash,
    Carets,
    Star,
    /// `_:label` or `[`; rejected by the parser with a clear message.
    BlankNode,
    /// Lexical error; reported only if the parser reaches it.
    Invalid(Box<SparqlError>),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::IriRef(i) => write!(f, "<{i}>"),
            Tok::PName { prefix, local } => write!(f, "{prefix}:{local}"),
            Tok::Var(v) => write!(f, "?{v}"),
            Tok::Str(_) => f.write_str("string literal"),
            Tok::LangTag(l) => write!(f, "@{l}"),
            Tok::Number { lexical, .. } => f.write_str(lexical),
            Tok::Word(w) => f.write_str(w),
            Tok::LBrace => f.write_str("'{'"),
            Tok::RBrace => f.write_str("'}'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Dot => f.write_str("'.'"),
            Tok::Semi => f.write_str("';'"),
            Tok::Comma => f.write_str("','"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Carets => f.write_str("'^^'"),
            Tok::Star => f.write_str("'*'"),
            Tok::BlankNode => f.write_str("blank node"),
            Tok::Invalid(_) => f.write_str("invalid token"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

/// Tokens up to the first lexical error, which becomes a trailing
/// [`Tok::Invalid`] so that earlier unsupported keywords are reported first.
pub(crate) fn tokenize(text: &str) -> Vec<Token> {
    let mut lx = Lexer {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    if let Err(e) = tokenize_into(&mut lx, &mut out) {
        let (line, column) = match &e {
            SparqlError::Syntax { line, column, .. } => (*line, *column),
            _ => (lx.line, lx.column),
        };
        out.push(Token {
            tok: Tok::Invalid(Box::new(e)),
            line,
            column,
        });
    }
    out
}

fn tokenize_into(lx: &mut Lexer, out: &mut Vec<Token>) -> Result<(), SparqlError> {
    loop {
        lx.skip_ws_and_comments();
        let (line, column) = (lx.line, lx.column);
        let Some(c) = lx.peek() else {
            out.push(Token { tok: Tok::Eof, line, column });
            return Ok(());
        };
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line, column });
        match c {
            '<' => {
                lx.bump();
                let iri = lx.iri_body(line, column)?;
                push(out, Tok::IriRef(iri));
            }
            '?' | '$' => {
                lx.bump();
                let name = lx.take_while(|c| c.is_alphanumeric() || c == '_');
                if name.is_empty() {
                    return Err(lx.error(line, column, "expected variable name"));
                }
                push(out, Tok::Var(name));
            }
            '"' | '\'' => {
                lx.bump();
                let s = lx.string_body(c, line, column)?;
                push(out, Tok::Str(s));
                if lx.peek() == Some('@') {
                    let (l, col) = (lx.line, lx.column);
                    lx.bump();
                    let tag = lx.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                    if tag.is_empty() {
                        return Err(lx.error(l, col, "expected language tag after '@'"));
                    }
                    out.push(Token { tok: Tok::LangTag(tag), line: l, column: col });
                }
            }
            '{' => single(lx, out, Tok::LBrace, line, column),
            '}' => single(lx, out, Tok::RBrace, line, column),
            '(' => single(lx, out, Tok::LParen, line, column),
            ')' => single(lx, out, Tok::RParen, line, column),
            ';' => single(lx, out, Tok::Semi, line, column),
            ',' => single(lx, out, Tok::Comma, line, column),
            '/' => single(lx, out, Tok::Slash, line, column),
            '*' => single(lx, out, Tok::Star, line, column),
            '[' => single(lx, out, Tok::BlankNode, line, column),
            '^' if lx.peek_at(1) == Some('^') => {
                lx.bump();
                lx.bump();
                push(out, Tok::Carets);
            }
            '_' if lx.peek_at(1) == Some(':') => {
                lx.bump();
                lx.bump();
                lx.take_while(is_local_char);
                push(out, Tok::BlankNode);
            }
            c if c.is_ascii_digit()
                || ((c == '+' || c == '-') && lx.peek_at(1).is_some_and(|d| d.is_ascii_digit() || d == '.'))
                || (c == '.' && lx.peek_at(1).is_some_and(|d| d.is_ascii_digit())) =>
            {
                let (lexical, datatype) = lx.number();
                push(out, Tok::Number { lexical, datatype });
            }
            '.' => single(lx, out, Tok::Dot, line, column),
            c if c.is_alphabetic() || c == ':' => {
                let word = lx.take_while(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.');
                if lx.peek() == Some(':') {
                    lx.bump();
                    let local = lx.local_part();
                    for tok in split_prefixed(&word, &local, line, column)? {
                        push(out, tok);
                    }
                } else if word.is_empty() {
                    return Err(lx.error(line, column, "unexpected ':'"));
                } else {
                    // Words never end in '.', which is the triple terminator.
                    let trimmed = word.trim_end_matches('.');
                    let extra = word.len() - trimmed.len();
                    lx.rewind(extra);
                    push(out, Tok::Word(trimmed.to_owned()));
                }
            }
            other => return Err(lx.error(line, column, &format!("unexpected character '{other}'"))),
        }
    }
}

fn single(lx: &mut Lexer, out: &mut Vec<Token>, tok: Tok, line: usize, column: usize) {
    lx.bump();
    out.push(Token { tok, line, column });
}

fn is_local_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '/' | '%')
}

/// A prefixed name whose local part contains both `/` and `:` is read as a
/// path of prefixed names (`ex:a/ex:b`). Without a `:` after the slash the
/// whole token stays one name (`bsbm:v01/vocabulary/rating2`).
fn split_prefixed(prefix: &str, local: &str, line: usize, column: usize) -> Result<Vec<Tok>, SparqlError> {
    if !(local.contains('/') && local.contains(':')) {
        return Ok(vec![Tok::PName {
            prefix: prefix.to_owned(),
            local: local.to_owned(),
        }]);
    }
    let mut segments = local.split('/');
    let mut out = vec![Tok::PName {
        prefix: prefix.to_owned(),
        local: segments.next().unwrap_or_default().to_owned(),
    }];
    for seg in segments {
        out.push(Tok::Slash);
        if seg == "a" {
            out.push(Tok::Word("a".into()));
            continue;
        }
        let Some((p, l)) = seg.split_once(':') else {
            return Err(SparqlError::Syntax {
                line,
                column,
                message: format!("path step `{seg}` in `{prefix}:{local}` is not a prefixed name"),
            });
        };
        out.push(Tok::PName {
            prefix: p.to_owned(),
            local: l.to_owned(),
        });
    }
    Ok(out)
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.pos + n).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    /// Steps back over `n` characters on the current line.
    fn rewind(&mut self, n: usize) {
        self.pos -= n;
        self.column -= n;
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|&c| pred(c)) {
            s.push(c);
            self.bump();
        }
        s
    }

    fn error(&self, line: usize, column: usize, message: &str) -> SparqlError {
        SparqlError::Syntax {
            line,
            column,
            message: message.to_owned(),
        }
    }

    fn skip_ws_and_comments(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn local_part(&mut self) -> String {
        let local = self.take_while(is_local_char);
        let trimmed = local.trim_end_matches(['.', '/']);
        let extra = local.chars().count() - trimmed.chars().count();
        self.rewind(extra);
        trimmed.to_owned()
    }

    fn iri_body(&mut self, line: usize, column: usize) -> Result<String, SparqlError> {
        let mut iri = String::new();
        loop {
            match self.bump() {
                Some('>') => return Ok(iri),
                Some('\\') => iri.push(self.unicode_escape(line, column)?),
                Some(c) if c.is_whitespace() || c == '<' => {
                    return Err(self.error(line, column, "IRI contains whitespace or '<'"));
                }
                Some(c) => iri.push(c),
                None => return Err(self.error(line, column, "unterminated IRI")),
            }
        }
    }

    fn unicode_escape(&mut self, line: usize, column: usize) -> Result<char, SparqlError> {
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error(line, column, "unsupported escape")),
        };
        let hex: String = (0..len).filter_map(|_| self.bump()).collect();
        u32::from_str_radix(&hex, 16)
            .ok()
            .filter(|_| hex.len() == len)
            .and_then(char::from_u32)
            .ok_or_else(|| self.error(line, column, "invalid unicode escape"))
    }

    fn string_body(&mut self, quote: char, line: usize, column: usize) -> Result<String, SparqlError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                Some(c) if c == quote => return Ok(s),
                Some('\n') | Some('\r') | None => {
                    return Err(self.error(line, column, "unterminated string literal"));
                }
                Some('\\') => {
                    let c = match self.peek() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') | Some('U') => {
                            s.push(self.unicode_escape(line, column)?);
                            continue;
                        }
                        _ => return Err(self.error(self.line, self.column, "unsupported escape in string")),
                    };
                    self.bump();
                    s.push(c);
                }
                Some(c) => s.push(c),
            }
        }
    }

    fn number(&mut self) -> (String, &'static str) {
        use crate::vocab::{XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER};
        let mut s = String::new();
        if let Some(c) = self.peek().filter(|&c| c == '+' || c == '-') {
            s.push(c);
            self.bump();
        }
        s.push_str(&self.take_while(|c| c.is_ascii_digit()));
        let mut datatype = XSD_INTEGER;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            s.push('.');
            s.push_str(&self.take_while(|c| c.is_ascii_digit()));
            datatype = XSD_DECIMAL;
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let sign = usize::from(matches!(self.peek_at(1), Some('+' | '-')));
            if self.peek_at(1 + sign).is_some_and(|c| c.is_ascii_digit()) {
                for _ in 0..=sign {
                    s.push(self.bump().unwrap());
                }
                s.push_str(&self.take_while(|c| c.is_ascii_digit()));
                datatype = XSD_DOUBLE;
            }
        }
        (s, datatype)
    }
}
