use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", config_message(.line, .field, .message))]
    Config { line: Option<usize>, field: Option<String>, message: String },
    #[error(transparent)]
    Runtime(#[from] reupload_core::Error),
    #[error("{0}")]
    Failed(String),
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

fn config_message(line: &Option<usize>, field: &Option<String>, message: &str) -> String {
    let mut out = String::new();
    if let Some(l) = line {
        out.push_str(&format!("line {l}: "));
    }
    if let Some(f) = field {
        out.push_str(&format!("{f}: "));
    }
    out.push_str(message);
    out
}

impl CliError {
    pub fn config(line: Option<usize>, field: Option<&str>, message: impl Into<String>) -> Self {
        CliError::Config { line, field: field.map(str::to_string), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 1 for configuration problems, 2 for failures while computing, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 1,
            CliError::Runtime(_) | CliError::Failed(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
