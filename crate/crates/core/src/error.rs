use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid too small for boundary closure: {0} cells (need at least 4)")]
    GridTooSmall(usize),

    #[error("invalid grid spacing {0} (must be positive and finite)")]
    InvalidSpacing(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("layout error: {0}")]
    Layout(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("invalid material: {0}")]
    Material(String),

    #[error("invalid boundary configuration: {0}")]
    Boundary(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("state dimension {dim} exceeds the cap of {cap}; use fewer cells per axis")]
    DimensionCap { dim: usize, cap: usize },

    #[error("eigenvalue solver failed: {0}")]
    Eigen(String),

    #[error("empty record")]
    EmptyRecord,

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, err: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), message: err.to_string() }
    }
}
