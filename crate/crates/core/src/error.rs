use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    IndexOutOfRange { vertex: usize, n: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("search cap exceeded: {0}")]
    SearchCapExceeded(String),
    #[error("root counts differ: host has {host}, pattern has {pattern}")]
    RootCountMismatch { host: usize, pattern: usize },
    #[error("invalid linkage: {0}")]
    InvalidLinkage(String),
    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("certificate not found: {0}")]
    CertificateNotFound(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("vertex {0} is a terminal endpoint of a longer path")]
    TerminalEndpoint(usize),
    #[error("terminal {0} is not on the boundary")]
    TerminalNotOnBoundary(usize),
    #[error("well is not tight")]
    NotTight,
    #[error("parameter too small: {0}")]
    ParameterTooSmall(String),
    #[error("vitality self-check failed: {0}")]
    VitalityValidationFailed(String),
    #[error("generation cap exceeded: {0}")]
    GenerationCapExceeded(String),
    #[error("gadget family too small: need {need}, have {have}")]
    FamilyTooSmall { need: usize, have: usize },
    #[error("clique too small: order {have}, bound requires {need}")]
    CliqueTooSmall { have: usize, need: usize },
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
