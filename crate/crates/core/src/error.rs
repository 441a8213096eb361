use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the recognition pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty glyph")]
    EmptyGlyph,

    #[error("grid does not partition image: {rows}x{cols} zones over {width}x{height} pixels")]
    GridMismatch {
        width: usize,
        height: usize,
        rows: usize,
        cols: usize,
    },

    #[error("expected {expected_w}x{expected_h} image, got {width}x{height}")]
    WrongDimensions {
        expected_w: usize,
        expected_h: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("feature dimension mismatch: model expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("ill-conditioned; increase ridge")]
    IllConditioned,

    #[error("class with zero samples: {0}")]
    MissingClass(u8),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("image decode failed: {0}")]
    Decode(#[from] image::ImageError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }

    /// True for errors caused by invalid settings rather than bad input data.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) | Error::IllConditioned => true,
            Error::File { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
