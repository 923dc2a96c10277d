use thiserror::Error;

use crate::var::Var;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet mismatch for {var}: expected size {expected}, found {found}")]
    AlphabetMismatch { var: Var, expected: usize, found: usize },

    #[error("invalid pmf `{name}`: {detail}")]
    InvalidPmf { name: String, detail: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("invalid information query: {0}")]
    InvalidQuery(String),

    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid document: {0}")]
    Document(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn pmf(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::InvalidPmf {
            name: name.into(),
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
