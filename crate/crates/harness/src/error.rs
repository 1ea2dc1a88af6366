use ftpl_mset::ConfigError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(ftpl_mset::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
    #[error("trial {trial} failed: {source}")]
    Trial { trial: usize, source: Box<HarnessError> },
}

impl From<ftpl_mset::Error> for HarnessError {
    fn from(e: ftpl_mset::Error) -> Self {
        match e {
            ftpl_mset::Error::Config(c) => Self::Config(c),
            other => Self::Core(other),
        }
    }
}

impl HarnessError {
    /// Process exit status: 2 for configuration errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Trial { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
