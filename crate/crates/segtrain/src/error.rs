//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid mask: pixel ({row},{col}) has value {value}, num_classes is {num_classes}")]
    InvalidMaskValue {
        row: usize,
        col: usize,
        value: u8,
        num_classes: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("duplicate sample id `{0}`")]
    DuplicateSampleId(String),

    #[error("unknown sample id `{0}`")]
    UnknownSampleId(String),

    #[error("unsupported index file version {found} (expected {expected})")]
    IndexVersion { found: u64, expected: u64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("k-shot selection infeasible for classes {0:?} (fewer than k scenes contain them)")]
    KShotInfeasible(Vec<u8>),

    #[error("missing prerequisite artifact: {0}")]
    MissingArtifact(PathBuf),

    #[error("config error: {0}")]
    Config(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("image error at {path}: {source}")]
    Image {
        path: PathBuf,
        source: image::ImageError,
    },

    #[error("serialization error: {0}")]
    Serde(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn image(path: impl Into<PathBuf>, source: image::ImageError) -> Self {
        Error::Image {
            path: path.into(),
            source,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code for the CLI: 1 usage/config, 2 runtime, 3 failed check.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) => 1,
            Error::CheckFailed(_) => 3,
            _ => 2,
        }
    }
}
