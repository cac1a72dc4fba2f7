use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image of {width}x{height} pixels holds no whole {block_size}x{block_size} block")]
    ImageTooSmall {
        width: usize,
        height: usize,
        block_size: usize,
    },

    #[error("block size must be at least 1")]
    InvalidBlockSize,

    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("image {image_id}: {source}")]
    InImage {
        image_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("corrupt file{}: {reason}", offset.map(|o| format!(" at byte {o}")).unwrap_or_default())]
    CorruptFile { offset: Option<u64>, reason: String },

    #[error("unsupported bit depth {0}; only 8-bit channels are accepted")]
    BitDepthUnsupported(u32),

    #[error("report has no rows")]
    EmptyReport,

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("report serialization failed: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn in_image(image_id: &str, source: Error) -> Self {
        Error::InImage {
            image_id: image_id.to_owned(),
            source: Box::new(source),
        }
    }

    pub(crate) fn corrupt(offset: impl Into<Option<u64>>, reason: impl Into<String>) -> Self {
        Error::CorruptFile {
            offset: offset.into(),
            reason: reason.into(),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        match err.into_kind() {
            csv::ErrorKind::Io(e) => Error::Io(e),
            other => Error::Serialize(format!("{other:?}")),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        if err.is_io() {
            Error::Io(err.into())
        } else {
            Error::Serialize(err.to_string())
        }
    }
}
