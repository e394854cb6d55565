use std::path::PathBuf;

use thiserror::Error;

/// Problems with a scenario file or command line; these map to exit code 2.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),

    #[error("cannot parse scenario: {0}")]
    Parse(String),

    #[error("check `{check}` references unknown field `{field}`")]
    UnknownField { check: String, field: String },

    #[error("check `{check}`: field `{field}` must be a {expected} field")]
    FieldRole { check: String, field: String, expected: &'static str },

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] objectivity_core::Error),
}

/// Failures while writing outputs.
#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),

    #[error("cannot encode report: {0}")]
    Json(#[from] serde_json::Error),

    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
}
