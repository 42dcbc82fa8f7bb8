use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// One problem found while validating a scenario file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    /// Dotted key path such as `link.bandwidth_hz` or `sweep[0].points`.
    pub key: String,
    /// 1-based line in the source text, when the key could be located.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid scenario ({} issue{}):\n{}", .0.len(), if .0.len() == 1 { "" } else { "s" }, render_issues(.0))]
    Validation(Vec<ConfigIssue>),

    #[error("unknown computation or preset `{0}`")]
    UnknownComputation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed table file {path}: {message}")]
    Format { path: PathBuf, message: String },

    /// A core routine rejected the inputs of one sweep point.
    #[error("sweep point {index} ({point}): {source}")]
    Point {
        index: usize,
        point: String,
        #[source]
        source: thz_turb_core::Error,
    },
}

fn render_issues(issues: &[ConfigIssue]) -> String {
    issues
        .iter()
        .map(|i| format!("  {i}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl CliError {
    /// Process exit code: 2 for numerical failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Point { source, .. } if source.is_numerical() => 2,
            _ => 1,
        }
    }

    pub fn issues(&self) -> &[ConfigIssue] {
        match self {
            CliError::Validation(v) => v,
            _ => &[],
        }
    }
}
