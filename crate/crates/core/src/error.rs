use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image of {width}x{height} is smaller than the 5x5 filter support")]
    TooSmall { width: usize, height: usize },

    #[error("pixel buffer holds {actual} values, expected {expected}")]
    BufferSize { expected: usize, actual: usize },

    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    #[error("invalid label map: {0}")]
    InvalidLabels(String),

    #[error("invalid distance configuration: {0}")]
    InvalidConfig(String),

    #[error("gradient-mean contrast initialisation needs the gradient magnitude")]
    MissingGradient,

    #[error("region graph is disconnected: agglomeration stopped with {components} components")]
    Disconnected { components: usize },

    #[error("label {label} does not fit a 16-bit PNG")]
    LabelOverflow { label: u32 },

    #[error("malformed tree document at line {line}, column {column}: {message}")]
    Document {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn image(path: impl Into<PathBuf>, source: image::ImageError) -> Self {
        Error::Image {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for the command line front end: 1 for I/O
    /// failures, 2 for invalid input or configuration.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Image { .. } => 1,
            _ => 2,
        }
    }
}
