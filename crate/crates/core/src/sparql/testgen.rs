//! Random AST generators shared by the parser and validator tests.

use proptest::prelude::*;

use super::ast::*;
use crate::term::Literal;
use crate::vocab::{XSD_DECIMAL, XSD_INTEGER};

const PREFIXES: &[(&str, &str)] = &[("ex", "urn:ex:"), ("vers", "urn:converg:vocab:")];
const VARS: &[&str] = &["a", "b", "c", "version", "vng"];

fn arb_var() -> impl Strategy<Value = String> {
    prop::sample::select(VARS).prop_map(str::to_owned)
}

fn arb_named() -> impl Strategy<Value = AstTerm> {
    prop_oneof![
        "[a-z]{1,6}".prop_map(|s| AstTerm::Iri(format!("urn:x:{s}"))),
        (prop::sample::select(PREFIXES), "[a-z][a-z0-9_-]{0,5}").prop_map(|((p, _), l)| AstTerm::Prefixed {
            prefix: p.to_owned(),
            local: l
        }),
        Just(AstTerm::Prefixed {
            prefix: "ex".into(),
            local: "v01/vocabulary/rating2".into()
        }),
    ]
}

fn arb_literal() -> impl Strategy<Value = AstTerm> {
    prop_oneof![
        "[ -~\t\n]{0,6}".prop_map(|s| AstTerm::Literal(Literal::simple(s))),
        (0u32..1000).prop_map(|n| AstTerm::Literal(Literal::typed(n.to_string(), XSD_INTEGER).unwrap())),
        "[0-9]{1,3}\\.[0-9]{1,2}".prop_map(|s| AstTerm::Literal(Literal::typed(s, XSD_DECIMAL).unwrap())),
        ("[a-z]{1,5}", "[a-z]{2}").prop_map(|(s, l)| AstTerm::Literal(Literal::lang(s, l).unwrap())),
        "[a-z\"]{0,4}".prop_map(|s| AstTerm::PrefixedTypedLiteral {
            lexical: s,
            prefix: "ex".into(),
            local: "dt".into()
        }),
    ]
}

fn arb_triple() -> impl Strategy<Value = TriplePattern> {
    let subject = prop_oneof![arb_var().prop_map(AstTerm::Var), arb_named()];
    let step = prop_oneof![
        3 => "[a-z]{1,4}".prop_map(|s| AstTerm::Iri(format!("urn:p:{s}"))),
        1 => Just(AstTerm::RdfType),
        2 => "[a-z]{1,4}".prop_map(|l| AstTerm::Prefixed { prefix: "vers".into(), local: l }),
    ];
    let predicate = prop_oneof![
        3 => arb_var().prop_map(|v| Predicate::Term(AstTerm::Var(v))),
        3 => step.clone().prop_map(Predicate::Term),
        1 => arb_named().prop_map(Predicate::Term),
        1 => prop::collection::vec(step, 2..=3).prop_map(Predicate::Path),
    ];
    let object = prop_oneof![arb_var().prop_map(AstTerm::Var), arb_named(), arb_literal()];
    (subject, predicate, object).prop_map(|(subject, predicate, object)| TriplePattern {
        subject,
        predicate,
        object,
    })
}

fn arb_pattern() -> impl Strategy<Value = Pattern> {
    let leaf = prop::collection::vec(arb_triple(), 0..3).prop_map(Pattern::Bgp);
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            (prop_oneof![arb_var().prop_map(AstTerm::Var), arb_named()], inner.clone())
                .prop_map(|(t, p)| Pattern::Graph(t, Box::new(p))),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Pattern::Join),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Pattern::Minus(Box::new(l), Box::new(r))),
            inner.prop_map(|p| {
                let vars: Vec<_> = p.visible_vars().into_iter().collect();
                if vars.is_empty() {
                    return p;
                }
                Pattern::SubSelect(Box::new(Select {
                    projection: vars.into_iter().map(Projection::Var).collect(),
                    pattern: p,
                    group_by: None,
                }))
            }),
        ]
    })
}

pub(crate) fn arb_query() -> impl Strategy<Value = Query> {
    (arb_pattern(), any::<bool>(), 0usize..5).prop_filter_map("needs a visible variable", |(pattern, grouped, f)| {
        let vars: Vec<String> = pattern.visible_vars().into_iter().collect();
        let first = vars.first()?.clone();
        let function = [
            AggregateFunction::Count,
            AggregateFunction::CountDistinct,
            AggregateFunction::Max,
            AggregateFunction::Min,
            AggregateFunction::Sum,
        ][f];
        let (projection, group_by) = if grouped {
            let agg = Projection::Aggregate {
                function,
                argument: vars.last().unwrap().clone(),
                alias: if f % 2 == 0 { None } else { Some("out".into()) },
            };
            (vec![Projection::Var(first.clone()), agg], Some(vec![first]))
        } else {
            (vars.into_iter().map(Projection::Var).collect(), None)
        };
        Some(Query {
            prefixes: PREFIXES.iter().map(|(p, i)| (p.to_string(), i.to_string())).collect(),
            select: Select {
                projection,
                pattern,
                group_by,
            },
        })
    })
}

