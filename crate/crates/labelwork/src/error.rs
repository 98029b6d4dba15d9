use std::path::{Path, PathBuf};

use serde_json::{json, Value};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{}: unknown label name {name:?}", path.display())]
    UnknownName { path: PathBuf, name: String },
    #[error("{}: {source}", path.display())]
    Invalid {
        path: PathBuf,
        #[source]
        source: labelwork_core::Error,
    },
    #[error(transparent)]
    Core(#[from] labelwork_core::Error),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn parse(path: &Path, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    pub fn invalid(path: &Path, source: labelwork_core::Error) -> Self {
        Error::Invalid {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::UnknownName { .. } => "unknown_label",
            Error::Invalid { .. } | Error::Core(_) => "invalid_input",
            Error::Config(_) => "config",
            Error::Usage(_) => "usage",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) => 2,
            _ => 1,
        }
    }

    /// Machine-readable form written to stderr by the binary.
    pub fn to_json(&self) -> Value {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        match self {
            Error::Io { path, .. } | Error::Invalid { path, .. } | Error::UnknownName { path, .. } => {
                body["path"] = json!(path.display().to_string());
            }
            Error::Parse { path, line, .. } => {
                body["path"] = json!(path.display().to_string());
                body["line"] = json!(line);
            }
            _ => {}
        }
        json!({ "error": body })
    }
}
