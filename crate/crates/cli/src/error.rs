use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] murmur_core::Error),

    #[error("non-finite {what} at {at} (value {value})")]
    NonFinite {
        at: String,
        what: &'static str,
        value: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("malformed csv: {0}")]
    Parse(String),
}

impl CliError {
    /// 2 for anything the caller can fix by changing the configuration, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        use murmur_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(
                E::InvalidArgument(_)
                | E::EmptyPrimeWindow { .. }
                | E::EmptySpecialWindow { .. }
                | E::SharpWeight
                | E::ModulusTooLarge { .. },
            ) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
