use thiserror::Error;

/// Errors produced by the channel model and its numerical primitives.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument outside the domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("{function}: result not representable ({detail})")]
    Range {
        function: &'static str,
        detail: String,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate:e}, error {error:e})"
    )]
    NoConvergence {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    #[error("outage series is singular for integer alpha - beta = {order}; use the numerical outage instead")]
    SeriesSingular { order: f64 },

    #[error("outage series is numerically unreliable at this threshold ({reason}); use the numerical outage instead")]
    SeriesDivergent { reason: String },

    #[error("target outage {target:e} is below the outage floor {floor:e} set by the no-overlap atom")]
    BelowOutageFloor { target: f64, floor: f64 },

    #[error("power bracket [{low:e}, {high:e}] W gives outage [{outage_high:e}, {outage_low:e}], which does not contain {target:e}")]
    BracketMismatch {
        low: f64,
        high: f64,
        outage_low: f64,
        outage_high: f64,
        target: f64,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
