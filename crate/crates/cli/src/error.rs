use std::io;

use blockconv::Error as CoreError;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_CONTRACT: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{origin}:{line}: {msg}")]
    Parse {
        origin: String,
        line: u64,
        msg: String,
    },

    #[error("{0}: {1}")]
    Io(String, io::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical contract violated: {0}")]
    Contract(String),
}

impl CliError {
    pub fn parse(origin: &str, line: u64, msg: String) -> Self {
        CliError::Parse {
            origin: origin.to_string(),
            line,
            msg,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(CoreError::NoConvergence { .. } | CoreError::Undefined(_)) => EXIT_CONTRACT,
            CliError::Core(CoreError::NonFinite(_)) => EXIT_IO,
            CliError::Core(_) | CliError::Config(_) => EXIT_CONFIG,
            CliError::Parse { .. } | CliError::Io(..) => EXIT_IO,
            CliError::Contract(_) => EXIT_CONTRACT,
        }
    }
}
