use thiserror::Error;

/// Errors produced anywhere in the toolkit. Variant names double as stable
/// error identifiers for the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("UnsupportedCapture: {0}")]
    UnsupportedCapture(String),
    #[error("TruncatedCapture: capture truncated at byte offset {offset}")]
    TruncatedCapture { offset: usize },
    #[error("ParseError: line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("SchemaError: {0}")]
    SchemaError(String),
    #[error("ZeroVarianceError: sample is constant")]
    ZeroVariance,
    #[error("DomainError: {0}")]
    Domain(String),
    #[error("InsufficientData: need at least {need} points, got {got}")]
    InsufficientData { need: usize, got: usize },
    #[error("SingularDesign: regression design matrix is singular")]
    SingularDesign,
    #[error("OrderSelectionError: no (p, q) candidate could be fitted")]
    OrderSelection,
    #[error("InsufficientHistory: need {need} values, got {got}")]
    InsufficientHistory { need: usize, got: usize },
    #[error("EmptyTrace: model produces no frames within the configured duration")]
    EmptyTrace,
    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable identifier, independent of the display text.
    pub fn identifier(&self) -> &'static str {
        match self {
            Error::UnsupportedCapture(_) => "UnsupportedCapture",
            Error::TruncatedCapture { .. } => "TruncatedCapture",
            Error::ParseError { .. } => "ParseError",
            Error::SchemaError(_) => "SchemaError",
            Error::ZeroVariance => "ZeroVarianceError",
            Error::Domain(_) => "DomainError",
            Error::InsufficientData { .. } => "InsufficientData",
            Error::SingularDesign => "SingularDesign",
            Error::OrderSelection => "OrderSelectionError",
            Error::InsufficientHistory { .. } => "InsufficientHistory",
            Error::EmptyTrace => "EmptyTrace",
            Error::Io(_) => "IoError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
