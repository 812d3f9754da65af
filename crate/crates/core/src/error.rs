use std::io;

use thiserror::Error;

/// Errors raised anywhere in the segmentation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },

    #[error("schema violation in `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("invalid data: {0}")]
    Invalid(String),

    #[error("corpus contains no dialogs")]
    EmptyCorpus,

    #[error("empty confusion matrix")]
    EmptyConfusion,

    #[error("feature layout mismatch: model expects {expected}, got {actual}")]
    LayoutMismatch { expected: String, actual: String },

    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("training failed: {0}")]
    Training(String),

    #[error("oracle state space has more than {limit} states; use Monte-Carlo estimation")]
    StateSpaceTooLarge { limit: usize },

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    /// Any of the above, tagged with the file it came from.
    #[error("{path}: {source}")]
    InFile { path: String, source: Box<Error> },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    pub fn in_file(self, path: &std::path::Path) -> Self {
        Error::InFile {
            path: path.display().to_string(),
            source: Box::new(self),
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Training(_) => 3,
            Error::InFile { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
