use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("inputs are on different taxon sets")]
    TaxonMismatch,
    #[error("unknown taxon {0}")]
    UnknownTaxon(String),
    #[error("instance too large for exact method: {what} is {actual}, limit {limit}")]
    Guard {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    #[error("no common chain longer than {0}")]
    NoChain(usize),
    #[error("certificate lifting failed: {0}")]
    Lift(String),
    #[error("trivially NO: {0}")]
    TrivialNo(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn guard(what: &'static str, actual: usize, limit: usize) -> Result<()> {
    if actual > limit {
        Err(Error::Guard { what, actual, limit })
    } else {
        Ok(())
    }
}
