//! Crate-wide error with a user-error / storage-fault split.

use thiserror::Error;

use crate::engine::{EngineError, QueryError};
use crate::gen::GenError;
use crate::nquads::ParseError;
use crate::sparql::SparqlError;
use crate::store::StoreError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Gen(#[from] GenError),
}

impl From<SparqlError> for Error {
    fn from(e: SparqlError) -> Self {
        Error::Query(e.into())
    }
}

impl From<EngineError> for Error {
    fn from(e: EngineError) -> Self {
        Error::Query(e.into())
    }
}

impl Error {
    /// I/O failures and corrupt snapshots; everything else is bad input.
    pub fn is_storage_fault(&self) -> bool {
        match self {
            Error::Store(e) => e.is_storage_fault(),
            Error::Gen(GenError::Io { .. }) => true,
            Error::Parse(_) | Error::Query(_) | Error::Gen(GenError::Config(_)) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    #[test]
    fn classification() {
        let io = || std::io::Error::other("disk");
        assert!(Error::from(StoreError::Io {
            path: PathBuf::from("x"),
            source: io()
        })
        .is_storage_fault());
        assert!(!Error::from(StoreError::UnknownVng("urn:x".into())).is_storage_fault());
        assert!(!Error::from(SparqlError::InvalidTerm("x".into())).is_storage_fault());
        assert!(Error::from(GenError::Io {
            path: PathBuf::from("x"),
            source: io()
        })
        .is_storage_fault());
    }
}
