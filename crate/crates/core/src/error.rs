use alloc::string::String;
use core::fmt;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition.
    InvalidInput(String),
    /// Two objects that must describe the same actor set do not.
    DimensionMismatch { expected: usize, found: usize },
    /// An enumeration over the model state space would be too large.
    StateSpaceTooLarge { actors: usize, max_actors: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected} actors, found {found}")
            }
            Error::StateSpaceTooLarge { actors, max_actors } => write!(
                f,
                "state space too large: {actors} actors (at most {max_actors} supported)"
            ),
        }
    }
}

impl core::error::Error for Error {}
