use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("site index {site} out of range for a chain of {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("a lone sigma-y operator is not real; build sigma-y pairs with embed_pauli_yy")]
    LoneSigmaY,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("operator dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate coupling: {0}")]
    DegenerateCoupling(String),

    #[error("invalid coupling term: {0}")]
    InvalidTerm(String),

    #[error("time step too large: predictor moved the magnetization by {delta:.3}")]
    StepTooLarge { delta: f64 },

    #[error("trace too short: autocorrelation never fell below 1/e within {len} samples")]
    TraceTooShort { len: usize },

    #[error("zero weight has no resistor (open circuit)")]
    OpenCircuit,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("failed to parse {what}: {reason}")]
    Parse { what: String, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a failure while running.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Io { .. } | Error::StepTooLarge { .. } | Error::TraceTooShort { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
