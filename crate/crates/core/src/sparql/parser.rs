use std::collections::HashSet;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::SparqlError;
use crate::term::Literal;
use crate::vocab::XSD_BOOLEAN;

/// Words that name SPARQL features outside the supported subset.
const UNSUPPORTED: &[&str] = &[
    "FILTER",
    "OPTIONAL",
    "UNION",
    "BIND",
    "VALUES",
    "SERVICE",
    "ORDER",
    "LIMIT",
    "OFFSET",
    "HAVING",
    "REDUCED",
    "BASE",
    "CONSTRUCT",
    "ASK",
    "DESCRIBE",
    "FROM",
    "AVG",
    "SAMPLE",
    "GROUP_CONCAT",
    "NOT",
    "EXISTS",
];

pub fn parse_query(text: &str) -> Result<Query, SparqlError> {
    let mut p = Parser {
        toks: tokenize(text),
        pos: 0,
        declared: HashSet::new(),
    };
    let prefixes = p.prologue()?;
    let select = p.select()?;
    match &p.peek().tok {
        Tok::Eof => Ok(Query { prefixes, select }),
        _ => Err(p.unexpected(&["end of input"])),
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    declared: HashSet<String>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn advance(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn at_word(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn eat_word(&mut self, kw: &str) -> bool {
        let hit = self.at_word(kw);
        if hit {
            self.advance();
        }
        hit
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        let hit = &self.peek().tok == tok;
        if hit {
            self.advance();
        }
        hit
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), SparqlError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    fn expect_word(&mut self, kw: &str) -> Result<(), SparqlError> {
        if self.eat_word(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&[kw]))
        }
    }

    /// Error for the current token. Unsupported keywords, blank nodes and
    /// lexical errors take precedence over the generic expected-set message.
    fn unexpected(&self, expected: &[&str]) -> SparqlError {
        let t = self.peek();
        match &t.tok {
            Tok::Invalid(e) => return (**e).clone(),
            Tok::Word(w) if UNSUPPORTED.iter().any(|k| w.eq_ignore_ascii_case(k)) => {
                return SparqlError::Unsupported {
                    line: t.line,
                    column: t.column,
                    operator: w.to_ascii_uppercase(),
                };
            }
            Tok::BlankNode => {
                return SparqlError::Unsupported {
                    line: t.line,
                    column: t.column,
                    operator: "blank node in query pattern".into(),
                };
            }
            _ => {}
        }
        SparqlError::Syntax {
            line: t.line,
            column: t.column,
            message: format!("expected one of: {}; found {}", expected.join(", "), t.tok),
        }
    }

    fn unsupported(&self, operator: &str) -> SparqlError {
        let t = self.peek();
        SparqlError::Unsupported {
            line: t.line,
            column: t.column,
            operator: operator.into(),
        }
    }

    fn prologue(&mut self) -> Result<Vec<(String, String)>, SparqlError> {
        let mut prefixes = Vec::new();
        while self.eat_word("PREFIX") {
            let prefix = match self.advance().tok {
                Tok::PName { prefix, local } if local.is_empty() => prefix,
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected(&["prefix declaration `name:`"]));
                }
            };
            let iri = match &self.peek().tok {
                Tok::IriRef(iri) => iri.clone(),
                _ => return Err(self.unexpected(&["IRI"])),
            };
            self.advance();
            self.declared.insert(prefix.clone());
            prefixes.push((prefix, iri));
        }
        Ok(prefixes)
    }

    fn select(&mut self) -> Result<Select, SparqlError> {
        self.expect_word("SELECT")?;
        if self.at_word("DISTINCT") {
            return Err(self.unsupported("SELECT DISTINCT"));
        }
        if self.peek().tok == Tok::Star {
            return Err(self.unsupported("SELECT *"));
        }
        let mut projection = Vec::new();
        let mut positions = Vec::new();
        loop {
            let t = self.peek().clone();
            let item = match &t.tok {
                Tok::Var(v) => {
                    self.advance();
                    Projection::Var(v.clone())
                }
                Tok::LParen => {
                    self.advance();
                    let (function, argument) = self.aggregate()?;
                    self.expect_word("AS")?;
                    let alias = match self.advance().tok {
                        Tok::Var(v) => v,
                        _ => {
                            self.pos -= 1;
                            return Err(self.unexpected(&["variable"]));
                        }
                    };
                    self.expect(Tok::RParen, "')'")?;
                    Projection::Aggregate {
                        function,
                        argument,
                        alias: Some(alias),
                    }
                }
                Tok::Word(w) if aggregate_keyword(w).is_some() => {
                    let (function, argument) = self.aggregate()?;
                    Projection::Aggregate {
                        function,
                        argument,
                        alias: None,
                    }
                }
                _ if projection.is_empty() => return Err(self.unexpected(&["variable", "aggregate"])),
                _ => break,
            };
            projection.push(item);
            positions.push((t.line, t.column));
        }
        self.eat_word("WHERE");
        let pattern = self.group()?;
        let group_by = if self.eat_word("GROUP") {
            self.expect_word("BY")?;
            let mut vars = Vec::new();
            while let Tok::Var(v) = &self.peek().tok {
                vars.push(v.clone());
                self.advance();
            }
            if vars.is_empty() {
                return Err(self.unexpected(&["variable"]));
            }
            Some(vars)
        } else {
            None
        };
        let select = Select {
            projection,
            pattern,
            group_by,
        };
        check_projection(&select, &positions)?;
        Ok(select)
    }

    /// `AGG ( DISTINCT? ?var )`
    fn aggregate(&mut self) -> Result<(AggregateFunction, String), SparqlError> {
        let function = match &self.peek().tok {
            Tok::Word(w) => aggregate_keyword(w),
            _ => None,
        };
        let Some(mut function) = function else {
            return Err(self.unexpected(&["COUNT", "MAX", "MIN", "SUM"]));
        };
        self.advance();
        self.expect(Tok::LParen, "'('")?;
        if self.at_word("DISTINCT") {
            if function != AggregateFunction::Count {
                return Err(self.misuse("DISTINCT is only supported inside COUNT"));
            }
            self.advance();
            function = AggregateFunction::CountDistinct;
        }
        let argument = match &self.peek().tok {
            Tok::Var(v) => v.clone(),
            Tok::Star => return Err(self.unsupported("COUNT(*)")),
            _ => return Err(self.unexpected(&["variable"])),
        };
        self.advance();
        self.expect(Tok::RParen, "')'")?;
        Ok((function, argument))
    }

    fn misuse(&self, message: &str) -> SparqlError {
        let t = self.peek();
        SparqlError::AggregateMisuse {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    /// `{ SELECT ... }` or `{ elements }`.
    fn group(&mut self) -> Result<Pattern, SparqlError> {
        self.expect(Tok::LBrace, "'{'")?;
        if self.at_word("SELECT") {
            let select = self.select()?;
            self.expect(Tok::RBrace, "'}'")?;
            return Ok(Pattern::SubSelect(Box::new(select)));
        }
        let mut items: Vec<Pattern> = Vec::new();
        let mut triples: Vec<TriplePattern> = Vec::new();
        let flush = |items: &mut Vec<Pattern>, triples: &mut Vec<TriplePattern>| {
            if !triples.is_empty() {
                items.push(Pattern::Bgp(std::mem::take(triples)));
            }
        };
        loop {
            match &self.peek().tok {
                Tok::RBrace => {
                    self.advance();
                    break;
                }
                Tok::Dot => {
                    self.advance();
                }
                Tok::LBrace => {
                    flush(&mut items, &mut triples);
                    let inner = self.group()?;
                    items.push(inner);
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("GRAPH") => {
                    flush(&mut items, &mut triples);
                    self.advance();
                    let target = match &self.peek().tok {
                        Tok::Var(_) | Tok::IriRef(_) | Tok::PName { .. } => self.term()?,
                        _ => return Err(self.unexpected(&["variable", "IRI"])),
                    };
                    let inner = self.group()?;
                    items.push(Pattern::Graph(target, Box::new(inner)));
                }
                Tok::Word(w) if w.eq_ignore_ascii_case("MINUS") => {
                    flush(&mut items, &mut triples);
                    self.advance();
                    let right = self.group()?;
                    let left = collapse(std::mem::take(&mut items));
                    items.push(Pattern::Minus(Box::new(left), Box::new(right)));
                }
                Tok::Var(_)
                | Tok::IriRef(_)
                | Tok::PName { .. }
                | Tok::Str(_)
                | Tok::Number { .. } => self.triples_same_subject(&mut triples)?,
                Tok::Word(w) if w == "true" || w == "false" => self.triples_same_subject(&mut triples)?,
                _ => return Err(self.unexpected(&["triple pattern", "GRAPH", "MINUS", "'{'", "'}'"])),
            }
        }
        flush(&mut items, &mut triples);
        Ok(collapse(items))
    }

    fn triples_same_subject(&mut self, out: &mut Vec<TriplePattern>) -> Result<(), SparqlError> {
        let subject = self.term()?;
        loop {
            let predicate = self.predicate()?;
            loop {
                let object = self.term()?;
                out.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            if !self.eat(&Tok::Semi) {
                break;
            }
            while self.eat(&Tok::Semi) {}
            if !self.starts_verb() {
                break;
            }
        }
        match &self.peek().tok {
            Tok::Dot | Tok::RBrace | Tok::LBrace => Ok(()),
            Tok::Word(w) if w.eq_ignore_ascii_case("GRAPH") || w.eq_ignore_ascii_case("MINUS") => Ok(()),
            _ => Err(self.unexpected(&["'.'", "';'", "','", "'}'"])),
        }
    }

    fn starts_verb(&self) -> bool {
        match &self.peek().tok {
            Tok::Var(_) | Tok::IriRef(_) | Tok::PName { .. } => true,
            Tok::Word(w) => w == "a",
            _ => false,
        }
    }

    fn predicate(&mut self) -> Result<Predicate, SparqlError> {
        if let Tok::Var(v) = &self.peek().tok {
            let v = v.clone();
            self.advance();
            if self.peek().tok == Tok::Slash {
                return Err(self.unsupported("property path over a variable"));
            }
            return Ok(Predicate::Term(AstTerm::Var(v)));
        }
        let mut steps = vec![self.verb()?];
        while self.eat(&Tok::Slash) {
            steps.push(self.verb()?);
        }
        Ok(if steps.len() == 1 {
            Predicate::Term(steps.pop().unwrap())
        } else {
            Predicate::Path(steps)
        })
    }

    fn verb(&mut self) -> Result<AstTerm, SparqlError> {
        match &self.peek().tok {
            Tok::Word(w) if w == "a" => {
                self.advance();
                Ok(AstTerm::RdfType)
            }
            Tok::IriRef(_) | Tok::PName { .. } => self.term(),
            _ => Err(self.unexpected(&["IRI", "prefixed name", "a", "variable"])),
        }
    }

    /// Variable, IRI, prefixed name or literal.
    fn term(&mut self) -> Result<AstTerm, SparqlError> {
        let t = self.peek().clone();
        let term = match t.tok {
            Tok::Var(v) => AstTerm::Var(v),
            Tok::IriRef(iri) => AstTerm::Iri(iri),
            Tok::PName { prefix, local } => {
                if !self.declared.contains(&prefix) {
                    return Err(SparqlError::UnknownPrefix {
                        line: t.line,
                        column: t.column,
                        prefix,
                    });
                }
                AstTerm::Prefixed { prefix, local }
            }
            Tok::Number { lexical, datatype } => AstTerm::Literal(
                Literal::typed(lexical, datatype).map_err(|e| SparqlError::InvalidTerm(e.to_string()))?,
            ),
            Tok::Word(w) if w == "true" || w == "false" => AstTerm::Literal(
                Literal::typed(w, XSD_BOOLEAN).map_err(|e| SparqlError::InvalidTerm(e.to_string()))?,
            ),
            Tok::Str(s) => {
                self.advance();
                return self.literal_tail(s);
            }
            _ => return Err(self.unexpected(&["variable", "IRI", "prefixed name", "literal"])),
        };
        self.advance();
        Ok(term)
    }

    fn literal_tail(&mut self, lexical: String) -> Result<AstTerm, SparqlError> {
        let t = self.peek().clone();
        let invalid = |e: crate::term::TermError| SparqlError::Syntax {
            line: t.line,
            column: t.column,
            message: e.to_string(),
        };
        let lit = match &t.tok {
            Tok::LangTag(tag) => {
                self.advance();
                Literal::lang(lexical, tag.clone()).map_err(invalid)?
            }
            Tok::Carets => {
                self.advance();
                match self.term()? {
                    AstTerm::Iri(iri) => Literal::typed(lexical, iri).map_err(invalid)?,
                    AstTerm::Prefixed { prefix, local } => {
                        return Ok(AstTerm::PrefixedTypedLiteral { lexical, prefix, local });
                    }
                    _ => {
                        self.pos -= 1;
                        return Err(self.unexpected(&["datatype IRI"]));
                    }
                }
            }
            _ => Literal::simple(lexical),
        };
        Ok(AstTerm::Literal(lit))
    }
}

fn aggregate_keyword(w: &str) -> Option<AggregateFunction> {
    match w.to_ascii_uppercase().as_str() {
        "COUNT" => Some(AggregateFunction::Count),
        "MAX" => Some(AggregateFunction::Max),
        "MIN" => Some(AggregateFunction::Min),
        "SUM" => Some(AggregateFunction::Sum),
        _ => None,
    }
}

fn collapse(mut items: Vec<Pattern>) -> Pattern {
    match items.len() {
        0 => Pattern::Bgp(Vec::new()),
        1 => items.pop().unwrap(),
        _ => Pattern::Join(items),
    }
}

/// Projection scoping and aggregate placement rules.
fn check_projection(select: &Select, positions: &[(usize, usize)]) -> Result<(), SparqlError> {
    let visible = select.pattern.visible_vars();
    let has_aggregate = select
        .projection
        .iter()
        .any(|p| matches!(p, Projection::Aggregate { .. }));
    let mut columns = HashSet::new();
    for (item, &(line, column)) in select.projection.iter().zip(positions) {
        let misuse = |message: String| SparqlError::AggregateMisuse { line, column, message };
        match item {
            Projection::Var(v) => {
                if !visible.contains(v) {
                    return Err(SparqlError::NotVisible {
                        line,
                        column,
                        variable: v.clone(),
                    });
                }
                match &select.group_by {
                    Some(keys) if !keys.contains(v) => {
                        return Err(misuse(format!("?{v} is projected but not in GROUP BY")));
                    }
                    None if has_aggregate => {
                        return Err(misuse(format!("?{v} is projected next to an aggregate without GROUP BY")));
                    }
                    _ => {}
                }
                if !columns.insert(v.clone()) {
                    return Err(misuse(format!("?{v} is projected twice")));
                }
            }
            Projection::Aggregate { argument, alias, .. } => {
                if !visible.contains(argument) {
                    return Err(misuse(format!("aggregate argument ?{argument} is not visible in the pattern")));
                }
                if let Some(a) = alias {
                    if visible.contains(a) {
                        return Err(misuse(format!("alias ?{a} is already bound by the pattern")));
                    }
                    if !columns.insert(a.clone()) {
                        return Err(misuse(format!("?{a} is projected twice")));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRE: &str = "PREFIX vers: <urn:converg:vocab:>\nPREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>\nPREFIX bsbm: <http://www4.wiwiss.fu-berlin.de/bizer/bsbm/>\n";

    fn parse(body: &str) -> Result<Query, SparqlError> {
        parse_query(&format!("{PRE}{body}"))
    }

    fn var(v: &str) -> AstTerm {
        AstTerm::Var(v.into())
    }

    fn pn(prefix: &str, local: &str) -> AstTerm {
        AstTerm::Prefixed {
            prefix: prefix.into(),
            local: local.into(),
        }
    }

    fn tp(s: AstTerm, p: AstTerm, o: AstTerm) -> TriplePattern {
        TriplePattern {
            subject: s,
            predicate: Predicate::Term(p),
            object: o,
        }
    }

    #[test]
    fn retrieve_all_resources_and_versions() {
        let q = parse(
            "SELECT ?version ?subj ?obj WHERE {
                GRAPH ?vng { ?subj rdf:type ?obj . }
                ?vng vers:is-in-version ?version .
            }",
        )
        .unwrap();
        assert_eq!(
            q.select.projection,
            vec![
                Projection::Var("version".into()),
                Projection::Var("subj".into()),
                Projection::Var("obj".into())
            ]
        );
        assert_eq!(
            q.select.pattern,
            Pattern::Join(vec![
                Pattern::Graph(
                    var("vng"),
                    Box::new(Pattern::Bgp(vec![tp(var("subj"), pn("rdf", "type"), var("obj"))]))
                ),
                Pattern::Bgp(vec![tp(var("vng"), pn("vers", "is-in-version"), var("version"))]),
            ])
        );
        assert_eq!(q.select.group_by, None);
    }

    #[test]
    fn difference_of_two_graphs() {
        let q = parse(
            "SELECT ?subj ?pred ?obj WHERE {
            { SELECT ?subj ?pred ?obj WHERE {
                GRAPH <urn:converg:vng:3> { ?subj ?pred ?obj . }
            } } MINUS {
                SELECT ?subj ?pred ?obj WHERE {
                GRAPH <urn:converg:vng:1> { ?subj ?pred ?obj . }
            } } }",
        )
        .unwrap();
        let Pattern::Minus(l, r) = &q.select.pattern else {
            panic!("expected MINUS, got {:?}", q.select.pattern);
        };
        assert!(matches!(**l, Pattern::SubSelect(_)));
        assert!(matches!(**r, Pattern::SubSelect(_)));
    }

    #[test]
    fn max_by_version_with_slash_name() {
        let q = parse(
            "SELECT ?version MAX(?o) WHERE {
                GRAPH ?vng { ?s bsbm:v01/vocabulary/rating2 ?o . }
                ?vng vers:is-in-version ?version .
            } GROUP BY ?version",
        )
        .unwrap();
        assert_eq!(
            q.select.projection[1],
            Projection::Aggregate {
                function: AggregateFunction::Max,
                argument: "o".into(),
                alias: None
            }
        );
        let Pattern::Join(items) = &q.select.pattern else { panic!() };
        let Pattern::Graph(_, inner) = &items[0] else { panic!() };
        assert_eq!(
            **inner,
            Pattern::Bgp(vec![tp(var("s"), pn("bsbm", "v01/vocabulary/rating2"), var("o"))])
        );
    }

    #[test]
    fn count_distinct_with_property_list_and_literal() {
        let q = parse(
            "SELECT ?graph COUNT(DISTINCT ?version) WHERE {
                GRAPH ?vng { ?subj rdf:type \"sensor\" . }
                ?vng vers:is-in-version ?version ;
                     vers:is-version-of ?graph .
            } GROUP BY ?graph",
        )
        .unwrap();
        assert_eq!(q.select.group_by, Some(vec!["graph".to_string()]));
        assert_eq!(
            q.select.projection[1],
            Projection::Aggregate {
                function: AggregateFunction::CountDistinct,
                argument: "version".into(),
                alias: None
            }
        );
        let Pattern::Join(items) = &q.select.pattern else { panic!() };
        let Pattern::Graph(_, inner) = &items[0] else { panic!() };
        let Pattern::Bgp(t) = &**inner else { panic!() };
        assert_eq!(t[0].object, AstTerm::Literal(Literal::simple("sensor")));
        let Pattern::Bgp(meta) = &items[1] else { panic!() };
        assert_eq!(meta.len(), 2);
    }

    #[test]
    fn paths_object_lists_and_shorthand() {
        let q = parse("PREFIX ex: <urn:ex:> SELECT ?x WHERE { ?x a ex:T ; ex:p/ex:q 5, 1.5, -2e3, true }").unwrap();
        let Pattern::Bgp(t) = &q.select.pattern else { panic!() };
        assert_eq!(t.len(), 5);
        assert_eq!(t[0].predicate, Predicate::Term(AstTerm::RdfType));
        assert_eq!(t[1].predicate, Predicate::Path(vec![pn("ex", "p"), pn("ex", "q")]));
        let lits: Vec<_> = t[1..]
            .iter()
            .map(|t| match &t.object {
                AstTerm::Literal(l) => (l.lexical().to_owned(), l.datatype().unwrap().rsplit('#').next().unwrap().to_owned()),
                _ => panic!(),
            })
            .collect();
        assert_eq!(
            lits,
            vec![
                ("5".into(), "integer".into()),
                ("1.5".into(), "decimal".into()),
                ("-2e3".into(), "double".into()),
                ("true".into(), "boolean".into())
            ]
        );
        let q = parse("SELECT ?x WHERE { ?x <urn:a>/<urn:b> ?y }").unwrap();
        let Pattern::Bgp(t) = &q.select.pattern else { panic!() };
        assert!(matches!(&t[0].predicate, Predicate::Path(s) if s.len() == 2));
    }

    #[test]
    fn aliases_and_where_optional() {
        let q = parse("SELECT (COUNT(?s) AS ?n) { ?s ?p ?o }").unwrap();
        assert_eq!(
            q.select.projection,
            vec![Projection::Aggregate {
                function: AggregateFunction::Count,
                argument: "s".into(),
                alias: Some("n".into())
            }]
        );
    }

    #[test]
    fn projected_variable_must_be_visible() {
        let err = parse_query("SELECT ?x WHERE { ?y <urn:p> ?z }").unwrap_err();
        assert_eq!(
            err,
            SparqlError::NotVisible {
                line: 1,
                column: 8,
                variable: "x".into()
            }
        );
        // MINUS right-hand variables are not in scope.
        assert!(parse_query("SELECT ?z WHERE { ?y <urn:p> ?x MINUS { ?y <urn:q> ?z } }").is_err());
    }

    #[test]
    fn aggregate_misuse() {
        let cases = [
            "SELECT ?s COUNT(?o) WHERE { ?s ?p ?o }",
            "SELECT ?s COUNT(?o) WHERE { ?s ?p ?o } GROUP BY ?p",
            "SELECT MAX(DISTINCT ?o) WHERE { ?s ?p ?o }",
            "SELECT (COUNT(?o) AS ?s) WHERE { ?s ?p ?o }",
            "SELECT COUNT(?q) WHERE { ?s ?p ?o }",
        ];
        for c in cases {
            assert!(
                matches!(parse_query(c), Err(SparqlError::AggregateMisuse { .. })),
                "{c}: {:?}",
                parse_query(c)
            );
        }
    }

    #[test]
    fn unsupported_operators() {
        let cases = [
            ("SELECT ?s WHERE { ?s ?p ?o OPTIONAL { ?s ?q ?r } }", "OPTIONAL"),
            ("SELECT ?s WHERE { ?s ?p ?o FILTER(?o > 3) }", "FILTER"),
            ("SELECT ?s WHERE { { ?s ?p ?o } UNION { ?s ?q ?o } }", "UNION"),
            ("SELECT ?s WHERE { ?s ?p ?o } ORDER BY ?s", "ORDER"),
            ("SELECT ?s WHERE { ?s ?p ?o } LIMIT 5", "LIMIT"),
            ("SELECT DISTINCT ?s WHERE { ?s ?p ?o }", "SELECT DISTINCT"),
            ("SELECT * WHERE { ?s ?p ?o }", "SELECT *"),
            ("SELECT ?s WHERE { ?s ?p _:b }", "blank node in query pattern"),
            ("SELECT ?s WHERE { ?s ?p ?o BIND(1 AS ?x) }", "BIND"),
        ];
        for (text, op) in cases {
            match parse_query(text) {
                Err(SparqlError::Unsupported { operator, .. }) => assert_eq!(operator, op, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        let msg = parse_query(cases[0].0).unwrap_err().to_string();
        assert!(msg.contains("unsupported operator"), "{msg}");
        assert!(msg.contains("GROUP BY"), "{msg}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_query("SELECT ?s WHERE {\n  ?s ?p }").unwrap_err();
        match err {
            SparqlError::Syntax { line, column, message } => {
                assert_eq!((line, column), (2, 9));
                assert!(message.contains("expected one of"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_query("SELECT ?s WHERE { ?s ex:p ?o }"),
            Err(SparqlError::UnknownPrefix { line: 1, column: 22, .. })
        ));
        assert!(parse_query("SELECT ?s WHERE { ?s ?p \"open }").is_err());
        assert!(parse_query("").is_err());
    }

    #[test]
    fn empty_group_and_nesting() {
        let q = parse_query("SELECT (COUNT(?s) AS ?n) WHERE { {} { ?s ?p ?o } }").unwrap();
        assert_eq!(
            q.select.pattern,
            Pattern::Join(vec![
                Pattern::Bgp(vec![]),
                Pattern::Bgp(vec![tp(var("s"), var("p"), var("o"))])
            ])
        );
    }
}
