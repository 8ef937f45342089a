use std::collections::HashMap;

use crate::dictionary::{Dictionary, TermId};
use crate::term::Term;

/// Query-local extension of the store dictionary. Terms the store knows keep
/// their store id; anything else (vng and version IRIs, query constants,
/// aggregate results) gets an id at or above `dict.len()`.
pub(crate) struct Overlay<'a> {
    dict: &'a Dictionary,
    extra: Vec<Term>,
    index: HashMap<Term, TermId>,
}

impl<'a> Overlay<'a> {
    pub fn new(dict: &'a Dictionary) -> Self {
        Self {
            dict,
            extra: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn intern(&mut self, term: &Term) -> TermId {
        if let Some(id) = self.dict.lookup(term) {
            return id;
        }
        if let Some(&id) = self.index.get(term) {
            return id;
        }
        let id = TermId((self.dict.len() + self.extra.len()) as u64);
        self.extra.push(term.clone());
        self.index.insert(term.clone(), id);
        id
    }

    pub fn decode(&self, id: TermId) -> &Term {
        match id.index().checked_sub(self.dict.len()) {
            Some(i) => &self.extra[i],
            None => self.dict.decode(id).expect("ids below dict.len() are allocated"),
        }
    }
}
