use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {message}")]
    Domain { op: &'static str, message: String },

    /// Elicitation constraints admit no beta distribution.
    #[error("no solution: {0}")]
    NoSolution(String),

    /// An iterative solver hit its iteration cap.
    #[error("{op} did not converge after {iterations} iterations")]
    NonConvergence { op: &'static str, iterations: usize },

    /// A request outside the supported scope (lot sizes, conditioning modes, supports).
    #[error("{0}")]
    Unsupported(String),

    /// An exhaustive oracle was asked for an instance above its enumeration bound.
    #[error("instance too large for enumeration: {0}")]
    TooLarge(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            op,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
