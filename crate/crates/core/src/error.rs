use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("edge ({0}, {1}) not found")]
    EdgeNotFound(usize, usize),

    #[error("invalid contraction trace: {0}")]
    InvalidTrace(String),

    #[error("shape mismatch: expected {expected} rows, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("graph has {nodes} nodes, above the dense eigensolver cap of {cap}")]
    SizeCapExceeded { nodes: usize, cap: usize },

    #[error("symmetric eigensolver did not converge on a {0}x{0} matrix")]
    ConvergenceFailure(usize),

    #[error(
        "similarity matrix of component {component} is ill-conditioned \
         (residual {residual:e}, condition estimate {condition:e})"
    )]
    IllConditioned {
        component: usize,
        residual: f64,
        condition: f64,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("missing file {0}")]
    MissingFile(PathBuf),

    #[error("{file}:{line}: malformed line: {reason}")]
    MalformedLine {
        file: String,
        line: usize,
        reason: String,
    },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code for the command-line surface: 1 for input errors,
    /// 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConvergenceFailure(_) | Error::IllConditioned { .. } => 2,
            _ => 1,
        }
    }

    pub fn is_numerical(&self) -> bool {
        self.exit_code() == 2
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
