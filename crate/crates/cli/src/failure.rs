use std::fmt;
use std::io;
use std::path::Path;

/// Command failure, mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2.
    Config(String),
    /// Exit 3.
    Io(String),
    /// Exit 4.
    Checkpoint(String),
    /// Exit 5.
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Io(_) => 3,
            Failure::Checkpoint(_) => 4,
            Failure::Verification(_) => 5,
        }
    }

    pub fn config(msg: impl fmt::Display) -> Self {
        Failure::Config(msg.to_string())
    }

    pub fn io(path: &Path, err: io::Error) -> Self {
        Failure::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "invalid configuration: {m}"),
            Failure::Io(m) => write!(f, "I/O error: {m}"),
            Failure::Checkpoint(m) => write!(f, "checkpoint error: {m}"),
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<primerace_core::SieveError> for Failure {
    fn from(e: primerace_core::SieveError) -> Self {
        Failure::config(e)
    }
}

impl From<primerace_core::CheckpointError> for Failure {
    fn from(e: primerace_core::CheckpointError) -> Self {
        Failure::Checkpoint(e.to_string())
    }
}
