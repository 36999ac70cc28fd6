//! Command-line front end: presets for every figure, job execution and CSV output.

use std::fmt;
use std::io;

pub mod app;
pub mod output;
pub mod presets;
pub mod tasks;

/// Why a command failed, mapped onto exit statuses.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Run(rdpce::Error),
    Io(io::Error),
}

impl Failure {
    /// 2 for usage errors, 1 for numerical or I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Run(e) => match e {
                rdpce::Error::InvalidArgument(_)
                | rdpce::Error::InvalidGrid(_)
                | rdpce::Error::Domain { .. } => 2,
                _ => 1,
            },
            Failure::Io(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "usage error: {msg}"),
            Failure::Run(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<rdpce::Error> for Failure {
    fn from(e: rdpce::Error) -> Self {
        Failure::Run(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}
