use std::fs;
use std::io;
use std::path::Path;

use gogtk::gog::GogError;
use gogtk::limit::LimitError;
use gogtk::space::SpaceError;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("config does not parse: {0}")]
    Parse(String),
    #[error(transparent)]
    Validation(#[from] GogError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Budget(#[from] SpaceError),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse(_) => "parse",
            CliError::Validation(_) => "validation",
            CliError::Usage(_) => "usage",
            CliError::Budget(_) => "budget",
            CliError::Limit(_) => "computation",
        }
    }

    pub fn to_json(&self, command: Option<&str>) -> Value {
        json!({ "command": command, "error": { "kind": self.kind(), "message": self.to_string() } })
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let io_err = |e: io::Error| CliError::Io { path: dir.join(name).display().to_string(), msg: e.to_string() };
    fs::create_dir_all(dir).map_err(io_err)?;
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(io_err)?;
    fs::rename(&tmp, dir.join(name)).map_err(io_err)
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}
