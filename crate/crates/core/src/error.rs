use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value encountered in {0}")]
    NumericDomain(&'static str),

    #[error("target {target} is not bracketed by [{lo}, {hi}]")]
    Bracketing { target: f64, lo: f64, hi: f64 },

    #[error("posterior is degenerate at x = {x}: survival function is zero")]
    DegeneratePosterior { x: f64 },

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("functional evaluation failed: {0}")]
    Evaluation(String),

    #[error("{excluded} of {total} draws produced non-finite functional values")]
    TooManyExcluded { excluded: usize, total: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
