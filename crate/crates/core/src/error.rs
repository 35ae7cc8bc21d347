use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("invalid parameter `{name}`: {msg}")]
    InvalidParameter { name: String, msg: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    /// Φ (or one of its derivatives) produced a non-finite value.
    #[error("symbol `{symbol}` evaluation failed at z = {z}: {msg}")]
    Evaluation { symbol: String, z: f64, msg: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("decode error at byte {offset}: {msg}")]
    Decode { offset: usize, msg: String },

    #[error("parse error at column {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    pub(crate) fn param(name: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::InvalidParameter { name: name.into(), msg: msg.into() }
    }
}
