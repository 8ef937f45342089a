//! Bijective term ↔ id encoding shared by every quad position.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::term::Term;

/// Dense identifier of a dictionary term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermId(pub u64);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DictionaryError {
    #[error("term id {0} is not allocated")]
    UnknownId(TermId),
    #[error("dictionary id space exhausted")]
    Exhausted,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dictionary {
    forward: HashMap<Term, TermId>,
    reverse: Vec<Term>,
}

impl Dictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `term`, allocating the next dense id if it is new.
    pub fn encode(&mut self, term: &Term) -> Result<TermId, DictionaryError> {
        if let Some(&id) = self.forward.get(term) {
            return Ok(id);
        }
        let id = self.next_id()?;
        self.forward.insert(term.clone(), id);
        self.reverse.push(term.clone());
        Ok(id)
    }

    pub fn lookup(&self, term: &Term) -> Option<TermId> {
        self.forward.get(term).copied()
    }

    pub fn decode(&self, id: TermId) -> Result<&Term, DictionaryError> {
        self.reverse.get(id.index()).ok_or(DictionaryError::UnknownId(id))
    }

    pub fn len(&self) -> usize {
        self.reverse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reverse.is_empty()
    }

    /// Id the next new term will receive.
    pub fn next_id(&self) -> Result<TermId, DictionaryError> {
        u64::try_from(self.reverse.len())
            .ok()
            .filter(|&n| n < u64::MAX)
            .map(TermId)
            .ok_or(DictionaryError::Exhausted)
    }

    /// Terms in id order.
    pub fn iter(&self) -> impl Iterator<Item = (TermId, &Term)> {
        self.reverse.iter().enumerate().map(|(i, t)| (TermId(i as u64), t))
    }

    /// Rebuilds a dictionary from terms listed in id order.
    pub fn from_terms(terms: Vec<Term>) -> Result<Self, Term> {
        let mut forward = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if forward.insert(t.clone(), TermId(i as u64)).is_some() {
                return Err(t.clone());
            }
        }
        Ok(Self {
            forward,
            reverse: terms,
        })
    }

    /// Forward and reverse maps are mutually inverse.
    pub fn check_bijection(&self) -> bool {
        self.forward.len() == self.reverse.len()
            && self
                .reverse
                .iter()
                .enumerate()
                .all(|(i, t)| self.forward.get(t) == Some(&TermId(i as u64)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::XSD_DECIMAL;
    use proptest::prelude::*;

    #[test]
    fn dense_and_idempotent() {
        let mut d = Dictionary::new();
        let b1 = Term::iri("urn:ex:bldg#1").unwrap();
        assert_eq!(d.encode(&b1).unwrap(), TermId(0));
        assert_eq!(d.encode(&b1).unwrap(), TermId(0));
        let ids: Vec<_> = ["urn:a", "urn:b"]
            .iter()
            .map(|s| d.encode(&Term::iri(*s).unwrap()).unwrap())
            .collect();
        assert_eq!(ids, vec![TermId(1), TermId(2)]);
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn decode_round_trip_and_unknown() {
        let mut d = Dictionary::new();
        let h = Term::typed_literal("10.5", XSD_DECIMAL).unwrap();
        let id = d.encode(&h).unwrap();
        assert_eq!(d.decode(id).unwrap(), &h);
        assert_eq!(d.decode(TermId(7)), Err(DictionaryError::UnknownId(TermId(7))));
    }

    #[test]
    fn from_terms_rejects_duplicates() {
        let a = Term::iri("urn:a").unwrap();
        assert!(Dictionary::from_terms(vec![a.clone(), a]).is_err());
    }

    #[test]
    fn ten_thousand_terms_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut d = Dictionary::new();
        let mut seen = Vec::new();
        for _ in 0..10_000 {
            let n: u32 = rng.gen_range(0..4000);
            let t = match rng.gen_range(0..3) {
                0 => Term::iri(format!("urn:r:{n}")).unwrap(),
                1 => Term::simple_literal(n.to_string()),
                _ => Term::blank(format!("b{n}")).unwrap(),
            };
            let id = d.encode(&t).unwrap();
            seen.push((t, id));
        }
        for (t, id) in &seen {
            assert_eq!(d.decode(*id).unwrap(), t);
        }
        assert!(d.check_bijection());
    }

    proptest! {
        #[test]
        fn ids_stay_dense(names in prop::collection::vec("[a-e]{1,2}", 0..60)) {
            let mut d = Dictionary::new();
            for n in &names {
                d.encode(&Term::iri(format!("urn:{n}")).unwrap()).unwrap();
            }
            let distinct: std::collections::HashSet<_> = names.iter().collect();
            prop_assert_eq!(d.len(), distinct.len());
            prop_assert!(d.iter().all(|(id, t)| d.lookup(t) == Some(id)));
        }
    }
}
