use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("model evaluation failed{}: {reason}", index.map(|i| format!(" at coordinate {i}")).unwrap_or_default())]
    Evaluation { index: Option<usize>, reason: String },

    #[error("model does not provide {0}")]
    MissingCapability(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("incomplete gradient stencil: {0}")]
    Stencil(String),

    #[error("degenerate weights: {0}")]
    DegenerateWeights(String),

    #[error("minimizer did not converge (best value {value:e} at {best:?})")]
    NoConvergence { best: Vec<f64>, value: f64 },

    #[error("config line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },

    #[error("config key `{key}`: {msg}")]
    ConfigValue { key: String, msg: String },

    #[error("dataset column `{column}`: {msg}")]
    Dataset { column: String, msg: String },

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn eval(index: Option<usize>, reason: impl Into<String>) -> Self {
        Error::Evaluation { index, reason: reason.into() }
    }

    /// True for errors that come from the configuration rather than from sampling.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::ConfigParse { .. } | Error::ConfigValue { .. } | Error::Dataset { .. }
        )
    }
}
