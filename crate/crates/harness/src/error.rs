use thiserror::Error;

/// Errors surfaced by the harness. Each maps to a documented process exit
/// code: schema problems exit 2, precondition problems exit 3, the
/// exact-enumeration size guard exits 4, and I/O failures exit 1.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("schema violation at {path}: {detail}")]
    Schema { path: String, detail: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Solver(#[from] regsubmax::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn schema(path: impl Into<String>, detail: impl ToString) -> HarnessError {
        HarnessError::Schema {
            path: path.into(),
            detail: detail.to_string(),
        }
    }

    /// Documented process exit code for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Schema { .. } => 2,
            HarnessError::Config(_) => 3,
            HarnessError::Solver(regsubmax::Error::GroundSetTooLarge { .. }) => 4,
            HarnessError::Solver(_) => 3,
            HarnessError::Io { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
