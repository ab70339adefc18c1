use std::path::PathBuf;

/// Error type shared by every solver entry point.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input data: dimension mismatches, bad distributions, bad CSV rows.
    #[error("invalid input: {0}")]
    Validation(String),

    /// Invalid scenario or solver configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The exhaustive solver refused to enumerate an instance this large.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// No distribution satisfies the scenario constraints.
    #[error("infeasible scenario: {0}")]
    Infeasible(String),

    /// A query fell outside the interpolation hull of a sweep or envelope.
    #[error("extrapolation refused: {0}")]
    Extrapolation(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
