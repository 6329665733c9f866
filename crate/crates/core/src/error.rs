use thiserror::Error;

/// Errors raised by the solver, the experiment drivers and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid {nx}x{ny} is too coarse: at least 8 cells per direction are required")]
    GridTooCoarse { nx: usize, ny: usize },

    #[error("fields live on different grids ({left} vs {right})")]
    GridMismatch { left: String, right: String },

    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("dense oracle is limited to {max} cells per direction, got {nx}x{ny}")]
    OracleGridTooLarge { nx: usize, ny: usize, max: usize },

    #[error("dense factorization failed: matrix is singular")]
    SingularSystem,

    #[error("solution blew up at step {step} (t = {t})")]
    BlowUp { step: usize, t: f64 },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("unknown config keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
