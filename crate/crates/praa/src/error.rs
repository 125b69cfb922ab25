use thiserror::Error;

/// Crate-wide error type. Messages are module-qualified so CLI users can
/// tell which stage of the pipeline rejected their input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema: {0}")]
    Schema(String),
    #[error("dataset: {0}")]
    Data(String),
    #[error("config: {0}")]
    Config(String),
    /// Bad parameter values (out-of-range counts, rates, masks). The CLI
    /// maps these to usage errors (exit code 2).
    #[error("{0}")]
    InvalidArgument(String),
    #[error("stats: {0}")]
    Stats(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
