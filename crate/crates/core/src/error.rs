use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown node {0}; G2 nodes are 1 and 2")]
    UnknownNode(i64),

    #[error("exponent or shift overflow")]
    Overflow,

    #[error("right-negativity undefined for identity")]
    RightNegativityOfIdentity,

    #[error("division by zero polynomial")]
    DivisionByZero,

    #[error("monomial {0} is not dominant")]
    NotDominant(String),

    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("invalid JSON: {0}")]
    Json(String),

    #[error("module with highest monomial {head} is not special: second dominant monomial {found}")]
    NotSpecial { head: String, found: String },

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("inconsistent q-character: {0}")]
    Inconsistent(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("inexact division at vertex {vertex} (mutation {step})")]
    InexactDivision { vertex: String, step: usize },

    #[error("cannot mutate frozen vertex {0}")]
    FrozenVertex(String),

    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),
}

impl Error {
    pub(crate) fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        Error::Syntax { pos, msg: msg.into() }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
