use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid system: {}", .0.join("; "))]
    Invalid(Vec<String>),

    #[error("observation alphabets differ: {0}")]
    ObsMismatch(String),

    #[error("set id {id} out of range (count {count})")]
    SetIdOutOfRange { id: usize, count: usize },

    #[error("action {action} is not enabled at state {state}")]
    DisabledAction { state: usize, action: usize },

    #[error("index was not built from this system")]
    IndexMismatch,

    #[error("fairness region does not match the system: {0}")]
    RegionMismatch(String),

    #[error("arena has no {0} payload")]
    MissingPayload(&'static str),

    #[error("strategy edge {from} -> {to} is not in the arena")]
    BadStrategyEdge { from: usize, to: usize },

    #[error("not a play: {0}")]
    NotAPlay(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
