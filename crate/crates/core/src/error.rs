use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("ergodicity error: {0}")]
    Ergodicity(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("consistency failure: {0}")]
    Consistency(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
