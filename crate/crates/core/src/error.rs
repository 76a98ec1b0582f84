use thiserror::Error;

/// Errors raised by the calculators, simulators, and harness.
///
/// Each variant maps onto one command-line exit code (see `cli::exit_code`).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("infeasible parameter regime: {0}")]
    Infeasible(String),

    #[error("no finite round count reaches the target: {0}")]
    Unattainable(String),

    #[error("enumeration guard: N = {n} exceeds the limit of {limit}")]
    EnumerationGuard { n: usize, limit: usize },

    #[error("circuit has {n} qubits; the simulator handles at most {limit}")]
    QubitLimit { n: usize, limit: usize },

    #[error("circuit line {line}: {message}")]
    CircuitParse { line: usize, message: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
