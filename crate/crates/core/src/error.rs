use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("object leaves the declared window: {0}")]
    WindowOverflow(String),
    #[error("enumeration cap exceeded: {what} needs {needed} > cap {cap}")]
    EnumerationCapExceeded {
        what: String,
        needed: u64,
        cap: u64,
    },
    #[error("no extension: E({c}, {a}) = 0")]
    NoExtension { c: String, a: String },
    #[error("annotation missing: {0}")]
    AnnotationMissing(String),
    #[error("unknown indecomposable: {0}")]
    UnknownIndec(String),
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("io error: {0}")]
    Io(String),
    #[error("non-integral multiplicity solution: {0}")]
    NonIntegralSolution(String),
    #[error("singular multiplicity matrix")]
    SingularMatrix,
    #[error("unsupported field characteristic {0}")]
    UnsupportedCharacteristic(u32),
    #[error("iteration cap reached without stabilising: {0}")]
    NonTermination(String),
    #[error("operation not provided by this backend: {0}")]
    Unsupported(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
