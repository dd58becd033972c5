use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration ({} violation(s))", .0.len())]
    Config(Vec<String>),
    #[error("cannot read config {path}: {source}")]
    ReadConfig { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] noisy_qng::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("TOML error: {0}")]
    Toml(#[from] toml::ser::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::ReadConfig { .. } => 2,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) | CliError::ReadConfig { .. } => "invalid-config",
            _ => "runtime",
        }
    }

    pub fn record(&self) -> ErrorRecord {
        ErrorRecord {
            error: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
            violations: match self {
                CliError::Config(v) => v.clone(),
                _ => Vec::new(),
            },
        }
    }
}

/// Machine-readable failure, printed as one JSON line on stderr.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: &'static str,
    pub exit_code: i32,
    pub message: String,
    pub violations: Vec<String>,
}
