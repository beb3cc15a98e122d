use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An input violated an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A table grew past the configured entry budget.
    #[error("budget exceeded at level {level}: {entries} entries (budget {budget})")]
    Budget {
        level: usize,
        entries: usize,
        budget: usize,
    },

    /// Fixed-width integer arithmetic would have overflowed.
    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),

    /// A text input could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A cached table failed revalidation.
    #[error("cache rejected: {0}")]
    Cache(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
