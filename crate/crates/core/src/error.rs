use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("malformed RLE: {0}")]
    MalformedRle(String),

    /// Schema or invariant violation while reading a file. `field` is a
    /// JSON-path-like locator such as `annotations[3].segmentations`.
    #[error("{}: {field}: {message}", path.display())]
    Load {
        path: PathBuf,
        field: String,
        message: String,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn load(path: impl Into<PathBuf>, field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Load {
            path: path.into(),
            field: field.into(),
            message: message.into(),
        }
    }
}
