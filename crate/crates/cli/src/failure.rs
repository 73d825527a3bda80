use std::fmt;

use spinloop::Error;

use crate::config::ConfigError;

/// Why a scenario (or the whole run) failed, and which exit code that maps to.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Library(Error),
    Io(anyhow::Error),
    /// `verify` ran but some oracle comparisons were out of tolerance.
    Checks(usize),
}

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SINGULARITY: u8 = 3;
pub const EXIT_NOT_A_LOOP: u8 = 4;

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Library(e) => match e {
                Error::NonFinite { .. }
                | Error::SouthPoleSingularity { .. }
                | Error::PoleSingularity { .. } => EXIT_SINGULARITY,
                Error::NotALoop { .. } => EXIT_NOT_A_LOOP,
                Error::Syntax { .. }
                | Error::UnsupportedFunction { .. }
                | Error::InvalidSpec(_)
                | Error::InvalidArgument(_) => EXIT_CONFIG,
                _ => EXIT_FAILURE,
            },
            Failure::Io(_) | Failure::Checks(_) => EXIT_FAILURE,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(msg) => write!(f, "config error: {msg}"),
            Failure::Library(e) if self.exit_code() == EXIT_SINGULARITY => {
                write!(f, "singularity: {e}")
            }
            Failure::Library(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "{e:#}"),
            Failure::Checks(n) => write!(f, "{n} oracle check(s) failed"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}
