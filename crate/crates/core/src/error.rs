use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid tuple: {0}")]
    InvalidTuple(String),

    /// An enumeration would exceed one of the fixed size caps.
    #[error("size limit exceeded: {what} is {actual}, limit {limit}")]
    SizeLimit {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("resource limit: {0}")]
    Resource(String),

    /// The requested formula does not apply to this input.
    #[error("wrong formula path: {0}")]
    WrongPath(String),

    /// Two computations that must agree did not.
    #[error("consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_limit(what: &'static str, actual: usize, limit: usize) -> Result<()> {
    if actual > limit {
        Err(Error::SizeLimit {
            what,
            actual,
            limit,
        })
    } else {
        Ok(())
    }
}
