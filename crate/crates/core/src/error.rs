use thiserror::Error;

/// Errors raised by the operator routines.
///
/// Every variant except [`Error::Io`] is a validation
/// failure: the request itself was outside the domain of the operation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {re}+{im}i is not inside the open unit disc")]
    OutsideDisc { re: f64, im: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite coefficient at index {index}")]
    NonFinite { index: usize },

    #[error("empty coefficient vector")]
    EmptySeries,

    #[error("nu = {re}+{im}i is within {distance:e} of the spectrum (tolerance {tolerance:e})")]
    SpectralPoint {
        re: f64,
        im: f64,
        distance: f64,
        tolerance: f64,
    },

    #[error("right-hand side has g(0) = {re}+{im}i != 0 and is not in the range of C_t - I")]
    NotInRange { re: f64, im: f64 },

    #[error("witness list is empty")]
    EmptyWitnesses,

    #[error("witness {index} has zero weighted norm")]
    DegenerateWitness { index: usize },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// `true` for failures caused by the request rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
