use thiserror::Error;

/// Errors produced by the library.
///
/// The variants are coarse on purpose: the CLI maps them to exit codes via
/// [`Error::kind`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("alphabet mismatch: {0}")]
    Alphabet(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("resource bound exceeded: {0}")]
    Resource(String),
}

/// Machine-readable error category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Domain,
    Range,
    Alphabet,
    Unsupported,
    Resource,
}

impl ErrorKind {
    pub fn tag(self) -> &'static str {
        match self {
            ErrorKind::Parse => "parse",
            ErrorKind::Domain => "domain",
            ErrorKind::Range => "range",
            ErrorKind::Alphabet => "alphabet",
            ErrorKind::Unsupported => "unsupported",
            ErrorKind::Resource => "resource",
        }
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } => ErrorKind::Parse,
            Error::Domain(_) => ErrorKind::Domain,
            Error::Range(_) => ErrorKind::Range,
            Error::Alphabet(_) => ErrorKind::Alphabet,
            Error::Unsupported(_) => ErrorKind::Unsupported,
            Error::Resource(_) => ErrorKind::Resource,
        }
    }

    /// The message without the category prefix of the `Display` form.
    pub fn detail(&self) -> String {
        match self {
            Error::Parse { position, message } => format!("at position {position}: {message}"),
            Error::Domain(m)
            | Error::Range(m)
            | Error::Alphabet(m)
            | Error::Unsupported(m)
            | Error::Resource(m) => m.clone(),
        }
    }

    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
