use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid intensity profile: {0}")]
    InvalidIntensity(String),

    #[error("invalid timeline: {0}")]
    InvalidTimeline(String),

    #[error("horizon must be positive and finite, got {0}")]
    InvalidHorizon(f64),

    #[error("timelines have mismatched windows: {0} vs {1}")]
    WindowMismatch(f64, f64),

    #[error("invalid superposition: {0}")]
    InvalidSuperposition(String),

    #[error("invalid semi-Markov model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid fleet log: {0}")]
    InvalidFleet(String),

    #[error("no exposure: {0}")]
    NoExposure(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    /// An I/O error that names the file involved.
    pub fn open(path: &std::path::Path, e: std::io::Error) -> Error {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
