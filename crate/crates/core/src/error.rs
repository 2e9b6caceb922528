use thiserror::Error;

/// Failures reported by every layer of the engine.
///
/// The variants line up with the CLI exit codes: mathematical failures exit
/// with 1, malformed input with 2 and exceeded resource bounds with 3.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("composition error: {0}")]
    Composition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("resource bound exceeded: {0}")]
    Resource(String),
    #[error("Killing form degenerate: {0}")]
    DegenerateKilling(String),
    #[error("degenerate pairing: {0}")]
    DegeneratePairing(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("inconsistency: {0}")]
    Inconsistent(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Dimension { .. } | Error::Invariant(_) => 2,
            Error::Resource(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
