use thiserror::Error;

/// Errors raised by the library.
///
/// The variants line up with the CLI exit codes: `Instance` and `Input`
/// map to exit 2, `Config` maps to exit 3.
#[derive(Debug, Error)]
pub enum Error {
    /// A problem, plan or vector is malformed or dimensions disagree.
    #[error("invalid instance: {0}")]
    Instance(String),

    /// A solver or pipeline configuration is not valid.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// External input (file, image) could not be parsed or is inconsistent.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("image error on {path}: {source}")]
    Image {
        path: String,
        #[source]
        source: image::ImageError,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn instance(msg: impl Into<String>) -> Self {
        Error::Instance(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
