use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot produce {requested} unique keys: key space holds at most {capacity}")]
    UnsatisfiableUniqueness { requested: u64, capacity: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("keys must be strictly ascending (violation at index {index})")]
    NotSorted { index: usize },

    #[error("dataset is empty")]
    EmptyInput,

    #[error("parse error in {path} at {location}: {message}")]
    Parse {
        path: PathBuf,
        location: String,
        message: String,
    },

    #[error("training diverged at epoch {epoch} (loss = {loss})")]
    TrainingDiverged { epoch: usize, loss: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
