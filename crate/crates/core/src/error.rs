use std::path::PathBuf;

use crate::corpus::ManifestError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("corrupt image {}: {message}", path.display())]
    CorruptImage { path: PathBuf, message: String },

    #[error("image encoding failed: {0}")]
    Encode(String),

    #[error("invalid float map: {0}")]
    FloatMap(String),

    #[error("crop of aspect ratio {ar} is degenerate for a {width}x{height} image")]
    DegenerateCrop { ar: String, width: u32, height: u32 },

    #[error("saliency map has zero total mass; cannot sample a focal point")]
    ZeroSaliency,

    #[error("strategy {0} has no focal point")]
    NoFocalPoint(&'static str),

    #[error("subgroup {0:?} is empty or unknown")]
    EmptySubgroup(String),

    #[error("unknown image id {0:?}")]
    UnknownImage(String),

    #[error(transparent)]
    Manifest(#[from] ManifestError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
