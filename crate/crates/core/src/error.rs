use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain where a formula is defined.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid input data: {0}")]
    Data(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// The Monte Carlo tables cannot resolve the requested false-detection rate.
    #[error("insufficient Monte Carlo samples: {0}")]
    InsufficientSamples(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
