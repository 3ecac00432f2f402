use std::io;
use std::path::PathBuf;

use crate::parser::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("{0}")]
    Ingest(String),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Version(String),
    #[error("{0}")]
    Training(String),
    #[error("{0}")]
    Structure(String),
    #[error("span {span} is ambiguous: {}", describe(.candidates))]
    Ambiguous { span: String, candidates: Vec<String> },
    #[error("{0}")]
    Precondition(String),
    #[error("artifact {} is locked by another process", path.display())]
    Locked { path: PathBuf },
}

fn describe(candidates: &[String]) -> String {
    if candidates.is_empty() {
        "no statement unit matches".to_string()
    } else {
        format!("candidates are {}", candidates.join(", "))
    }
}

/// Coarse grouping used for diagnostics and exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Version,
    Input,
    Io,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format { path: path.into(), message: message.into() }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::Precondition(_) => ErrorKind::Config,
            Error::Version(_) => ErrorKind::Version,
            Error::Io { .. } | Error::Locked { .. } => ErrorKind::Io,
            _ => ErrorKind::Input,
        }
    }
}
