use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] gricci::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Usage(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("time budget exhausted after {achieved} of {requested} samples (stderr {stderr:e})")]
    Budget { achieved: u64, requested: u64, stderr: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// 1 for bad input or failed checks, 2 for numeric breakdowns.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if !e.is_validation() => 2,
            CliError::Budget { .. } | CliError::Io { .. } => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        use gricci::Error as E;
        match self {
            CliError::Core(e) => match e {
                E::Dimension(_) => "dimension",
                E::SingularPairing { .. } => "singular_pairing",
                E::InvalidMetric(_) => "invalid_metric",
                E::InvalidAlgebra(_) => "invalid_algebra",
                E::InvalidGraph(_) => "invalid_graph",
                E::GraphTooLarge { .. } => "graph_too_large",
                E::DottedContent => "dotted_content",
                E::UnknownPreset(_) => "unknown_preset",
                E::InvalidConfig(_) => "invalid_config",
                E::CoincidentPoints => "coincident_points",
                E::WrongModel(_) => "wrong_model",
                E::Parse { .. } => "parse",
                E::StepUnderflow { .. } => "step_underflow",
                E::Numeric(_) => "numeric",
                E::Json(_) => "json",
                E::Io(_) => "io",
            },
            CliError::Config(_) => "invalid_config",
            CliError::Usage(_) => "usage",
            CliError::CheckFailed(_) => "check_failed",
            CliError::Budget { .. } => "budget_exceeded",
            CliError::Json(_) => "json",
            CliError::Io { .. } => "io",
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": { "kind": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() } })
            .to_string()
    }
}
