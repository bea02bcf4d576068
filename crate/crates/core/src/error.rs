use thiserror::Error;

/// Errors raised by threshold evaluation, construction, scanning and search.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An intermediate quantity that must be integral was not.
    #[error("formula domain error: {0}")]
    FormulaDomain(String),

    #[error("construction infeasible: {0}")]
    Infeasible(String),

    #[error("index {index} out of range for sequence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("arithmetic overflow while evaluating {0}")]
    Overflow(&'static str),

    #[error("enumeration budget exceeded: estimated {estimate} window evaluations, ceiling is {ceiling}")]
    Budget { estimate: u128, ceiling: u128 },

    #[error("search failed: no qualifying shift for alpha in [{from}, {to}]")]
    SearchFailure { from: u64, to: u64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
