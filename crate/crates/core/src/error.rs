use thiserror::Error;

/// Error type shared by every module in the crate.
///
/// The variants double as the CLI's exit-code categories, see
/// [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    /// Bad configuration value or an input that violates an operation's
    /// preconditions (empty corpus, single-class training data, ...).
    #[error("config: {0}")]
    Config(String),

    /// An input file does not conform to its format.
    #[error("parse: {0}")]
    Parse(String),

    /// Training or metric computation failed numerically.
    #[error("numeric: {0}")]
    Numeric(String),

    /// A model file is corrupt or does not match the current configuration.
    #[error("integrity: {0}")]
    Integrity(String),

    #[error("io: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn integrity(msg: impl Into<String>) -> Self {
        Error::Integrity(msg.into())
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Prefix the error message with the pipeline stage that produced it.
    pub fn with_stage(self, stage: &str) -> Self {
        match self {
            Error::Config(m) => Error::Config(format!("stage {stage}: {m}")),
            Error::Parse(m) => Error::Parse(format!("stage {stage}: {m}")),
            Error::Numeric(m) => Error::Numeric(format!("stage {stage}: {m}")),
            Error::Integrity(m) => Error::Integrity(format!("stage {stage}: {m}")),
            Error::Io { path, source } => Error::Io {
                path: format!("stage {stage}: {path}"),
                source,
            },
        }
    }

    /// Stable process exit code per error category.
    ///
    /// 1 = I/O, 2 = config or precondition, 3 = parse, 4 = numeric,
    /// 5 = integrity.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 1,
            Error::Config(_) => 2,
            Error::Parse(_) => 3,
            Error::Numeric(_) => 4,
            Error::Integrity(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
