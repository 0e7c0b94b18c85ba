use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

/// Version of every JSON and CSV document the tool writes.
pub const SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hidden_clique::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    schema: u32,
    error: ErrorBody<'a>,
}

/// Print a machine-readable error object on standard error.
pub fn emit_error(e: &CliError) {
    let doc = ErrorDoc { schema: SCHEMA, error: ErrorBody { kind: e.kind(), message: e.to_string() } };
    let text = serde_json::to_string_pretty(&doc).unwrap_or_else(|_| format!("{{\"error\":\"{e}\"}}"));
    eprintln!("{text}");
}

/// The envelope of every JSON result.
#[derive(Serialize)]
pub struct Document<'a, C: Serialize, R: Serialize> {
    pub schema: u32,
    pub command: &'a str,
    pub config: &'a C,
    pub result: &'a R,
}

pub fn json<C: Serialize, R: Serialize>(command: &str, config: &C, result: &R) -> String {
    let doc = Document { schema: SCHEMA, command, config, result };
    let mut s = serde_json::to_string_pretty(&doc).expect("results serialize");
    s.push('\n');
    s
}

/// Write `text` to `out`, or to standard output when `out` is `None`.
pub fn write(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}
