use thiserror::Error;

#[derive(Debug, Error)]
pub enum PackError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    /// All `capacity` bins are already open.
    #[error("capacity exhausted: all {capacity} bins are open")]
    CapacityExhausted { capacity: usize },

    #[error("training diverged: non-finite loss {loss}")]
    TrainingDiverged { loss: f64 },

    #[error("corrupt model: {0}")]
    CorruptModel(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, PackError>;
