use thiserror::Error;

/// Errors raised by the replicability library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("p-value out of range: {value} at feature {index} of study {study}")]
    PValueOutOfRange {
        study: usize,
        index: usize,
        value: f64,
    },

    #[error("length mismatch: study 1 has {len1} p-values, study 2 has {len2}")]
    LengthMismatch { len1: usize, len2: usize },

    #[error("expected {expected} feature ids, got {got}")]
    FeatureIdMismatch { expected: usize, got: usize },

    #[error("at least one feature is required")]
    NoFeatures,

    #[error("{name} must be in (0,1), got {value}")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("threshold {name} must be in (0,1], got {value}")]
    ThresholdOutOfRange { name: &'static str, value: f64 },

    #[error("directional selection requires left-sided p-values")]
    NotLeftSided,

    #[error("empty p-value vector")]
    EmptyPValues,

    /// One of the lambda-restricted selection sets is empty, so the plug-in
    /// estimate is undefined.
    #[error("adaptive procedure undefined: lambda-restricted selection of study {study} is empty")]
    EmptyLambdaSelection { study: usize },

    #[error("non-domination is only defined for Bonferroni-type threshold systems")]
    NotBonferroniSystem,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no replicates")]
    NoReplicates,

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
