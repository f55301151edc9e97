use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

/// What went wrong at a derivation node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum CheckErrorKind {
    RuleMismatch,
    SideConditionViolation,
    IndexMismatch,
    ContextMismatch,
    TypeMismatch,
    NegativeIndex,
}

impl fmt::Display for CheckErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A failed derivation check; `path` lists premise positions from the root.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind} at node /{}: {detail}", path_str(.path))]
pub struct CheckError {
    pub kind: CheckErrorKind,
    pub path: Vec<usize>,
    pub detail: String,
}

fn path_str(p: &[usize]) -> String {
    p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("/")
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("term `{0}` contains explicit substitutions")]
    NonPureTerm(String),
    #[error("term `{0}` is not normal")]
    NotNormal(String),
    #[error("no normal form within {0} steps")]
    FuelExhausted(usize),
    #[error("{0}")]
    Check(#[from] CheckError),
    #[error("pool does not match the multiset: {0}")]
    PoolMismatch(String),
    #[error("subject mismatch: {0}")]
    SubjectMismatch(String),
    #[error("redex is not typed: {0}")]
    NotTypedAtRedex(String),
    #[error("invalid type: {0}")]
    InvalidType(String),
    #[error("malformed derivation file: {0}")]
    Format(String),
}
