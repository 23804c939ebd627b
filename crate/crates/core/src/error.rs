use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("pairing matrix is numerically singular (condition number {condition:.3e})")]
    SingularPairing { condition: f64 },

    #[error("invalid generalized metric: {}", .0.join("; "))]
    InvalidMetric(Vec<String>),

    #[error("invalid algebra: {}", .0.join("; "))]
    InvalidAlgebra(Vec<String>),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph too large for brute-force search: {half_edges} half-edges (limit {limit})")]
    GraphTooLarge { half_edges: usize, limit: usize },

    #[error("graph contains dotted content; use contract_courant")]
    DottedContent,

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("coincident points")]
    CoincidentPoints,

    #[error("wrong model: {0}")]
    WrongModel(&'static str),

    #[error("expression parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("step size underflow at s = {s}: {reason}")]
    StepUnderflow { s: f64, reason: String },

    #[error("{0}")]
    Numeric(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Validation-type failures (bad input) as opposed to numeric breakdowns.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::StepUnderflow { .. } | Error::Numeric(_) | Error::Io(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
