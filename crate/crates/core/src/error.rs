use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the scheduler library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arm index {index} out of range for a space of {cardinality} policies")]
    IndexOutOfRange { index: usize, cardinality: usize },

    #[error("value {value} is not on axis `{axis}`")]
    NotOnAxis { axis: &'static str, value: f64 },

    #[error("invalid configuration space: {0}")]
    InvalidSpace(String),

    #[error("degenerate space: at least 2 arms are required, got {0}")]
    DegenerateSpace(usize),

    #[error("normalized reward {0} is outside [0, 1]")]
    RewardOutOfRange(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("regret requires counterfactual reward rows, but run {run} slot {slot} has none")]
    MissingRows { run: usize, slot: u64 },

    #[error("savings are undefined when the reference equals the minimum ({0})")]
    UndefinedSavings(f64),

    #[error("{path}:{line}: {message}")]
    TraceParse { path: PathBuf, line: u64, message: String },

    #[error("incomplete trace, missing (bucket, arm) pairs: {}", format_missing(.missing))]
    IncompleteTrace { missing: Vec<(String, usize)> },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn format_missing(missing: &[(String, usize)]) -> String {
    const SHOWN: usize = 8;
    let mut parts: Vec<String> = missing
        .iter()
        .take(SHOWN)
        .map(|(bucket, arm)| format!("({bucket}, {arm})"))
        .collect();
    if missing.len() > SHOWN {
        parts.push(format!("... {} more", missing.len() - SHOWN));
    }
    parts.join(", ")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by invalid user input rather than runtime failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidSpace(_)
                | Error::DegenerateSpace(_)
                | Error::Config(_)
                | Error::NotOnAxis { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
