use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector or matrix dimension did not match what the operation requires.
    #[error("shape mismatch in {context}: expected {expected}, got {got}")]
    Shape {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A forward cache was built against an older parameter state.
    #[error("stale forward cache: network parameters changed since the forward pass")]
    StaleCache,

    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArg(String),

    /// A run or file was requested for an environment that does not support it.
    #[error("unsupported environment: {0}")]
    UnsupportedEnv(String),

    /// Stepping an episode that has already finished.
    #[error("episode already finished; call reset before stepping again")]
    EpisodeFinished,

    #[error("action {action} out of range (environment has {n_actions} actions)")]
    ActionOutOfRange { action: usize, n_actions: usize },

    /// Bad run configuration (unknown key, unparsable value, inconsistent request).
    #[error("config error: {0}")]
    Config(String),

    /// A required input file (experts, preference checkpoint, ...) is absent.
    #[error("missing prerequisite: {0}")]
    MissingPrerequisite(String),

    /// A data file violated its declared format.
    #[error("format error in {path}: {message}")]
    Format { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn shape(context: &'static str, expected: usize, got: usize) -> Self {
        Error::Shape {
            context,
            expected,
            got,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
