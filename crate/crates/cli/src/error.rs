use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] causalflow::Error),
    #[error("{0}")]
    Input(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Input(_) => "INVALID_INPUT",
            CliError::Io { .. } => "IO_ERROR",
            CliError::Csv { .. } => "CSV_ERROR",
            CliError::Json { .. } => "JSON_ERROR",
            CliError::Usage(_) => "USAGE",
        }
    }

    /// 2 for numerical failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": crate::SCHEMA,
            "error": { "code": self.code(), "message": self.to_string() },
        })
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
