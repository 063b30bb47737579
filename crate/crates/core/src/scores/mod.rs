//! Decomposable log marginal-likelihood scores and the cached score table.

mod bde;
mod bge;
mod table;

pub use bde::{bde_two_node_marginals, BdeHyperparams, BdeScorer, DENSE_COUNT_LIMIT};
pub use bge::{BgeHyperparams, BgeScorer};
pub use table::{
    build_score_table, default_max_parents, ScoreTable, TableOptions, DEFAULT_TABLE_BUDGET,
};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::{Dag, NodeSet};
use std::fmt;
use std::str::FromStr;

/// A family score `ln P(X_v | X_P)` that decomposes over nodes.
pub trait LocalScore: Sync {
    fn node_count(&self) -> usize;

    /// `node` must not be in `parents`.
    fn local_score(&self, node: usize, parents: NodeSet) -> Result<f64>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScoreKind {
    Bge,
    Bde,
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreKind::Bge => "bge",
            ScoreKind::Bde => "bde",
        })
    }
}

impl FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bge" => Ok(ScoreKind::Bge),
            "bde" | "bdeu" => Ok(ScoreKind::Bde),
            other => Err(Error::InvalidHyperparameters(format!("unknown score `{other}`"))),
        }
    }
}

/// Either scorer behind one type, so callers can pick at run time.
#[derive(Clone, Debug)]
pub enum Scorer {
    Bge(BgeScorer),
    Bde(BdeScorer),
}

impl Scorer {
    /// Builds the scorer of `kind` with default hyperparameters.
    pub fn with_defaults(kind: ScoreKind, data: &Dataset) -> Result<Self> {
        match kind {
            ScoreKind::Bge => {
                Ok(Scorer::Bge(BgeScorer::new(data, &BgeHyperparams::defaults(data.n_cols()))?))
            }
            ScoreKind::Bde => Ok(Scorer::Bde(BdeScorer::new(data, &BdeHyperparams::default())?)),
        }
    }

    pub fn kind(&self) -> ScoreKind {
        match self {
            Scorer::Bge(_) => ScoreKind::Bge,
            Scorer::Bde(_) => ScoreKind::Bde,
        }
    }
}

impl LocalScore for Scorer {
    fn node_count(&self) -> usize {
        match self {
            Scorer::Bge(s) => s.node_count(),
            Scorer::Bde(s) => s.node_count(),
        }
    }

    fn local_score(&self, node: usize, parents: NodeSet) -> Result<f64> {
        match self {
            Scorer::Bge(s) => s.local_score(node, parents),
            Scorer::Bde(s) => s.local_score(node, parents),
        }
    }
}

/// `ln P(X | G)` as the sum of local scores in node order.
pub fn dag_log_score<S: LocalScore + ?Sized>(dag: &Dag, scorer: &S) -> Result<f64> {
    if dag.node_count() != scorer.node_count() {
        return Err(Error::NodeCountMismatch(dag.node_count(), scorer.node_count()));
    }
    let mut total = 0.0;
    for v in 0..dag.node_count() {
        total += scorer.local_score(v, dag.parents(v))?;
    }
    Ok(total)
}

fn check_family(node: usize, parents: NodeSet, n: usize) -> Result<()> {
    if node >= n {
        return Err(Error::NodeOutOfRange { node, node_count: n });
    }
    if parents & crate::graph::bit(node) != 0 {
        return Err(Error::SelfLoop(node));
    }
    if parents & !crate::graph::full_set(n) != 0 {
        let bad = (63 - parents.leading_zeros()) as usize;
        return Err(Error::NodeOutOfRange { node: bad, node_count: n });
    }
    Ok(())
}
