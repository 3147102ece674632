use thiserror::Error;

/// Failure modes shared by every module.
///
/// Each variant maps onto one CLI exit code, see [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a precondition (zero polynomial, p not prime, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// The input is well formed but the configuration is outside what is supported.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    /// Dedekind's criterion cannot be applied because p divides the index.
    #[error("index obstruction at p = {p}: p divides [O_K : Z[alpha]]; supply the factorization of {p}O_K externally")]
    IndexObstruction { p: u64 },
    /// A fixture or payload does not validate.
    #[error("invalid data: {0}")]
    Invalid(String),
    /// Required data is absent (missing eigenvalue, no fixture, cold cache in offline mode).
    #[error("data gap: {0}")]
    DataGap(String),
    /// Two independent computations disagree, or a verified input turned out false.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error("resource limit exceeded: {0}")]
    Limit(String),
    #[error("network: {0}")]
    Network(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 2 bad input, 3 data gap, 4 internal inconsistency.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DataGap(_) | Error::Network(_) => 3,
            Error::Inconsistency(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
