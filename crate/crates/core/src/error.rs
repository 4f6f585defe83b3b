use thiserror::Error;

/// Which of the placement/offloading constraints was violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// Offloading ratio outside `[0, 1]`.
    C1,
    /// Host is not a station of the infrastructure.
    C2,
    /// Local delay exceeds the deadline.
    C3,
    /// A VNF needs more compute than the mobile device has.
    C4,
    /// A VNF needs more compute than its host has available.
    C5,
    /// An inter-VNF flow needs more bandwidth than its path has available.
    C6,
    /// Edge delay exceeds the deadline.
    C7,
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no route from station {src} to station {dst}")]
    Unreachable { src: usize, dst: usize },

    #[error("constraint {constraint} violated: {detail}")]
    Infeasible { constraint: Constraint, detail: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("missing cells: {0}")]
    MissingCells(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
