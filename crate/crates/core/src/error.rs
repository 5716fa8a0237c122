use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not full-dimensional: {0}")]
    NotFullDimensional(String),
    #[error("unbounded: halfspaces do not describe a compact set")]
    Unbounded,
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("window contains no points of the set")]
    WindowEmpty,
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("measure is not lattice-periodic: {0}")]
    NotPeriodic(String),
    #[error("diffraction coefficient is not a positive real at {position:?}: {value}")]
    NotPositiveDefinite { position: Vec<f64>, value: String },
    #[error("{path}: {message}")]
    Json { path: String, message: String },
}

impl Error {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::MalformedInput(msg.into())
    }
}
