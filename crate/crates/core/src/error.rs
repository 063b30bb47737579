use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph has {0} nodes; at most {max} are supported", max = crate::graph::MAX_NODES)]
    TooManyNodes(usize),
    #[error("node index {node} out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(usize, usize),
    #[error("edge set contains a directed cycle")]
    Cycle,
    #[error("node count mismatch: {0} vs {1}")]
    NodeCountMismatch(usize, usize),
    #[error("invalid ordered partition: {0}")]
    InvalidPartition(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("column `{column}` has code {code} but declares {levels} levels")]
    UnseenLevel { column: String, code: f64, levels: usize },
    #[error("column `{0}` is constant; no quantile cut points exist")]
    ConstantColumn(String),
    #[error("scorer needs {expected} columns but `{column}` is not")]
    IncompatibleColumn { column: String, expected: &'static str },

    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparameters(String),
    #[error("scatter submatrix for node set {0:#b} is not positive definite")]
    NotPositiveDefinite(u64),
    #[error("score table would need {needed} entries, budget is {budget}")]
    TableBudgetExceeded { needed: u128, budget: usize },
    #[error("parent set {parents:#b} of node {node} is not in the score table")]
    MissingTableEntry { node: usize, parents: u64 },
    #[error("partition needs non-empty parent sets but the table caps parents at 0")]
    PartitionBeyondCap,

    #[error("invalid scenario configuration: {0}")]
    InvalidScenario(String),
    #[error("invalid chain configuration: {0}")]
    InvalidChainConfig(String),
    #[error("{0}")]
    InvalidQuery(String),
    #[error("no posterior samples")]
    EmptySamples,
    #[error("frequency ratio undefined: no samples of either graph")]
    UndefinedFrequencyRatio,
}
