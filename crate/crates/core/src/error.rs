use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {quantity} {reason}")]
    Domain { quantity: &'static str, reason: String },

    /// The document could not be read as CSV at all.
    #[error("unreadable document: {0}")]
    Unreadable(String),

    #[error("missing header row")]
    MissingHeader,

    #[error("header is missing required column `{0}`")]
    MissingColumn(String),

    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    /// Too few usable points for a fit or selector.
    #[error("insufficient data for {context}: need {needed}, have {have}")]
    InsufficientData {
        context: String,
        needed: usize,
        have: usize,
    },

    #[error("metric vector has {got} components, expected {expected}")]
    MissingComponent { expected: usize, got: usize },

    #[error("cannot plot non-positive values on a log axis (records: {})", .0.join(", "))]
    NonPositiveOnLogAxis(Vec<String>),

    #[error("config: {0}")]
    Config(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            quantity,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
