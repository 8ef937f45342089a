//! Embedded versioned quad store with a SPARQL-subset query engine that
//! evaluates over every version at once.

pub mod dictionary;
pub mod engine;
pub mod error;
pub mod gen;
pub mod nquads;
pub mod numeric;
pub mod sparql;
pub mod store;
pub mod term;
pub mod vocab;

pub use dictionary::{Dictionary, TermId};
pub use nquads::{parse_nquads, serialize_nquads, ParseMode, ParsedDocument};
pub use store::{Stats, Store, StoreError, VersionBitmap};
pub use term::{Literal, Quad, Term, Triple};
pub use vocab::VersionOrdinal;
pub use engine::{execute_query, QueryError, ResultTable};
pub use error::Error;
