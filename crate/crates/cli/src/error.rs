use std::fmt;
use std::io;
use std::path::Path;

/// Failure of a CLI command, tagged with the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2.
    BadArgs(String),
    /// Exit 3: unreadable, undecodable or malformed input.
    Input(String),
    /// Exit 4.
    Version(String),
    /// Exit 1.
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::BadArgs(_) => 2,
            CliError::Input(_) => 3,
            CliError::Version(_) => 4,
            CliError::Other(_) => 1,
        }
    }

    pub fn read(path: &Path, e: io::Error) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }

    pub fn write(path: &Path, e: io::Error) -> Self {
        CliError::Other(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::BadArgs(m) | CliError::Input(m) | CliError::Version(m) | CliError::Other(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<pedscan_core::Error> for CliError {
    fn from(e: pedscan_core::Error) -> Self {
        use pedscan_core::Error as E;
        match e {
            E::Config(_) | E::InvalidSize { .. } => CliError::BadArgs(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
