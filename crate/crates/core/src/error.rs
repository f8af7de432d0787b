use thiserror::Error;

use crate::fullgroup::PiecewiseDefect;

/// Errors raised by the library operations.
///
/// Property violations are never errors: they come back as report entries or
/// witnesses. Errors are reserved for malformed input and exhausted search
/// budgets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("search budget exceeded: more than {cap} candidates")]
    Budget { cap: usize },

    #[error("level {level} out of range (model depth {max})")]
    LevelOutOfRange { level: usize, max: usize },

    #[error("action is not transitive at level {level}: {orbits} orbits {decomposition:?}")]
    NotTransitive {
        level: usize,
        orbits: usize,
        decomposition: Vec<Vec<usize>>,
    },

    #[error("invalid piecewise element: {0}")]
    Piecewise(PiecewiseDefect),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
