use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    /// The request would exceed a configured size limit.
    #[error("{what} = {got} exceeds the configured limit of {limit}")]
    ResourceGuard {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported instance: {0}")]
    UnsupportedInstance(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("integration failed at lambda = {lambda}: {msg}")]
    Integration { lambda: f64, msg: String },
    #[error("no usable samples: {0}")]
    EmptySample(String),
    #[error("step budget of {0} exhausted")]
    BudgetExhausted(u64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameters(msg.into())
    }
}
