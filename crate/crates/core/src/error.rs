use thiserror::Error;

/// Every failure the engine reports. The CLI maps variants to exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("node {node} out of domain (n = {n})")]
    OutOfDomain { node: u64, n: usize },
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("duplicate key {0:?}")]
    DuplicateKey(Vec<u32>),
    #[error("unsupported fragment: {0}")]
    Unsupported(String),
    #[error("neighborhood of {size} nodes exceeds the canonicalization cap of {cap}")]
    NeighborhoodTooLarge { size: usize, cap: usize },
    #[error("skip domain overflow: {0}")]
    SkipDomainOverflow(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("unassigned free variable {0}")]
    Unassigned(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Unsupported(_) => 3,
            Error::NeighborhoodTooLarge { .. }
            | Error::SkipDomainOverflow(_)
            | Error::ResourceCap(_) => 4,
            _ => 2,
        }
    }
}
