use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid clause: {0}")]
    InvalidClause(String),
    #[error("graph contains a {0}-clique")]
    HasClique(usize),
    #[error("graph has a clique hitting every block")]
    HasTransversalClique,
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("budget of {0} exhausted")]
    BudgetExhausted(u64),
    #[error("branching program is not read-once: node {node} re-queries variable {var}")]
    NotReadOnce { node: usize, var: u32 },
    #[error("branching program rejected: {0}")]
    InvalidProgram(String),
    #[error("proof rejected at step {step}: {reason}")]
    InvalidProof { step: usize, reason: String },
    #[error("invalid homomorphism: {0}")]
    InvalidHomomorphism(String),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}
