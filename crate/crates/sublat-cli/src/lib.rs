//! Experiment runner behind the `sublat` binary.
//!
//! Everything lives in the library so tests can drive experiments without
//! spawning processes: [`config`] declares the JSON-serializable experiment
//! configuration, [`runner`] executes it into a [`table::ResultTable`], and
//! [`emit`] renders byte-deterministic CSV/JSON plus an optional SVG plot.

pub mod config;
pub mod emit;
pub mod plot;
pub mod runner;
pub mod table;

/// Failure classes mapped to process exit codes by the binary:
/// configuration errors exit 2, numerical-invariant violations exit 3,
/// I/O problems exit 1.
#[derive(Debug)]
pub enum RunError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(msg) => write!(f, "config error: {msg}"),
            RunError::Numeric(msg) => write!(f, "numerical invariant violated: {msg}"),
            RunError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for RunError {}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numeric(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

/// Classify a library error: precondition/size problems are configuration
/// mistakes, anything else that surfaces mid-run is a numerical invariant
/// failure.
pub fn classify(err: sublat::Error) -> RunError {
    use sublat::Error::*;
    match err {
        InvalidArgument(_)
        | ChainTooShort { .. }
        | OddPeriodicChain { .. }
        | FockTooLarge { .. }
        | IndexOutOfRange { .. }
        | DuplicateIndex { .. }
        | LengthMismatch { .. }
        | InvalidPartition { .. }
        | NegativeMu { .. }
        | InvalidAlpha { .. }
        | OddMajoranaSubset { .. } => RunError::Config(err.to_string()),
        other => RunError::Numeric(other.to_string()),
    }
}
