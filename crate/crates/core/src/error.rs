use thiserror::Error;

/// Errors shared by every layer of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A rewrite system or solver was configured inconsistently.
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Internal bookkeeping went out of sync (a bug, not bad input).
    #[error("internal consistency error: {0}")]
    Internal(String),

    /// A configured size cap was exceeded.
    #[error("resource limit exceeded: {what} would need {needed}, cap is {cap}")]
    Resource {
        what: String,
        needed: usize,
        cap: usize,
    },

    /// Input data failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// A text format could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The relaxation is infeasible for the given data.
    #[error("infeasible: {message} (feasibility margin {margin:.3e})")]
    Infeasible { message: String, margin: f64 },

    /// A search bracket came out empty or with an inconsistent end.
    #[error("search bracket inverted for {what}: low end {lo}, high end {hi}")]
    Bracket { what: String, lo: f64, hi: f64 },

    /// The solver did not converge to the requested accuracy.
    #[error("numerical limit: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
