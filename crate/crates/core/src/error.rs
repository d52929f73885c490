use thiserror::Error;

/// Errors shared by every layer of the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("endpoint mismatch: expected {expected}, found {found}")]
    EndpointMismatch { expected: String, found: String },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid basic arrow: {0}")]
    InvalidArrow(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("colours must satisfy k < l, got k = {k}, l = {l}")]
    ColourOrder { k: usize, l: usize },

    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("not a normalizing path: {0}")]
    NotANormalizingPath(String),

    #[error("the two sequences do not denote the same arrow of the simplicial category")]
    NotEqualArrows,

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn mismatch(expected: impl ToString, found: impl ToString) -> Error {
    Error::EndpointMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
