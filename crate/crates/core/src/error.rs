use thiserror::Error;

/// Errors raised by input validation and rule evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SftError {
    #[error("invalid symbol name {0:?}")]
    InvalidSymbol(String),
    #[error("duplicate symbol {0:?}")]
    DuplicateSymbol(String),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("symbol index {index} out of range for alphabet of size {size}")]
    SymbolOutOfRange { index: usize, size: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("forbidden patterns must have nonempty support")]
    EmptyForbiddenPattern,
    #[error("radius {requested} is smaller than the required {required}")]
    RadiusTooSmall { requested: usize, required: usize },
    #[error("rule has no value on window [{0}]")]
    RuleDomain(String),
    #[error("certificate side condition fails: k = {k} must exceed {bound}")]
    SideCondition { k: usize, bound: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed machine: {0}")]
    MalformedMachine(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, SftError>;

pub(crate) fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(SftError::Parse { line, message: message.into() })
}
