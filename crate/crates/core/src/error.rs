use thiserror::Error;

/// Errors raised by the solver toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("{x} lies outside the parameter interval [{a}, {b}]")]
    Domain { x: f64, a: f64, b: f64 },

    #[error("numerical failure in {what} (residual {residual:e})")]
    Numerical { what: String, residual: f64 },

    #[error("blow-up at step {step} (t = {time}): state exceeded {threshold:e} or became non-finite")]
    BlowUp {
        step: usize,
        time: f64,
        threshold: f64,
    },

    #[error("sample {index} (xi = {xi}): {source}")]
    Sample {
        index: usize,
        xi: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("curve {label}: {source}")]
    Curve {
        label: String,
        #[source]
        source: Box<Error>,
    },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

impl Error {
    /// True when the failure is a numerical blow-up, possibly wrapped in a sample error.
    pub fn is_blow_up(&self) -> bool {
        match self {
            Error::BlowUp { .. } => true,
            Error::Sample { source, .. } | Error::Curve { source, .. } => source.is_blow_up(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
