use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} is outside the available range {start}..{end}")]
    OutOfRange { index: usize, start: usize, end: usize },

    #[error("summation window at r = {r} exceeded the cap of {cap} terms")]
    WindowOverflow { r: f64, cap: usize },

    #[error("numeric overflow: {0}")]
    Overflow(String),

    #[error("sequence `{0}` has no real-argument extension")]
    MissingExtension(String),

    #[error("sequence `{0}` does not expose derivatives of its real extension")]
    MissingDerivatives(String),

    #[error(
        "first differences change sign on the checked range 0..={checked} (at m = {at}); \
         use error_bound_at_n instead"
    )]
    NotMonotone { checked: usize, at: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
