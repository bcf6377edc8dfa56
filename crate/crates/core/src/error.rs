use crate::exact_tensor::TensorError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum YbxError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("degree {got} exceeds the configured cap {cap}")]
    DegreeCap { cap: usize, got: usize },
    #[error("{tag}: {msg}")]
    Validation { tag: String, msg: String },
    #[error("precondition of {tag} violated: {msg}")]
    Precondition { tag: String, msg: String },
    #[error("cannot absorb or push shift factor {factor}: {msg}")]
    WeightObstruction { factor: String, msg: String },
    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, YbxError>;

impl YbxError {
    pub fn validation(tag: &str, msg: impl Into<String>) -> Self {
        YbxError::Validation { tag: tag.to_string(), msg: msg.into() }
    }

    pub fn precondition(tag: &str, msg: impl Into<String>) -> Self {
        YbxError::Precondition { tag: tag.to_string(), msg: msg.into() }
    }
}
