use thiserror::Error;

/// Errors raised by the engines.
///
/// `Refused` is reserved for size guards (enumeration caps, dense-operator
/// caps); everything else is a malformed or incompatible input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("scenario mismatch: expected {expected:?}, got {found:?}")]
    ScenarioMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("invalid term: {0}")]
    InvalidTerm(String),

    #[error("parse error in `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("refused: {what} requires cap {required}, configured cap is {cap}")]
    Refused {
        what: String,
        required: usize,
        cap: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("input is not a face: {0}")]
    NotAFace(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
}

impl Error {
    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn is_refusal(&self) -> bool {
        matches!(self, Error::Refused { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
