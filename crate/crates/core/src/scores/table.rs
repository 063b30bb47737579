//! Local scores cached for every admissible parent set.

use super::LocalScore;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::graph::{bit, full_set, members, Blacklist, Dag, NodeSet};
use std::collections::HashMap;

/// Default cap on the total number of table entries.
pub const DEFAULT_TABLE_BUDGET: usize = 5_000_000;

/// Node counts up to this size get a dense `2^n` lookup per node.
const DENSE_LOOKUP_MAX_NODES: usize = 12;

/// Unlimited parents (n - 1) up to 8 nodes, otherwise 3.
pub fn default_max_parents(node_count: usize) -> usize {
    if node_count <= 8 {
        node_count.saturating_sub(1)
    } else {
        3
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableOptions {
    /// `None` selects [`default_max_parents`].
    pub max_parents: Option<usize>,
    pub budget: usize,
    pub exec: Execution,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self { max_parents: None, budget: DEFAULT_TABLE_BUDGET, exec: Execution::default() }
    }
}

#[derive(Clone, Debug)]
enum Lookup {
    /// `table[node][parents]` is an index into `entries[node]`, or `u32::MAX`.
    Dense(Vec<Vec<u32>>),
    Hashed(Vec<HashMap<NodeSet, u32>>),
}

/// Read-only cache of `ln` local scores, one list per node sorted by parent
/// mask. Holds exactly the parent sets within the cap that avoid the
/// blacklist.
#[derive(Clone, Debug)]
pub struct ScoreTable {
    node_count: usize,
    max_parents: usize,
    blacklist: Blacklist,
    entries: Vec<Vec<(NodeSet, f64)>>,
    lookup: Lookup,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All subsets of `candidates` with at most `cap` members, in ascending
/// mask order.
fn subsets_up_to(candidates: NodeSet, cap: usize) -> Vec<NodeSet> {
    fn rec(items: &[usize], start: usize, cap: usize, cur: NodeSet, out: &mut Vec<NodeSet>) {
        out.push(cur);
        if cap == 0 {
            return;
        }
        for i in start..items.len() {
            rec(items, i + 1, cap - 1, cur | bit(items[i]), out);
        }
    }
    let items: Vec<usize> = members(candidates).collect();
    let mut out = Vec::new();
    rec(&items, 0, cap, 0, &mut out);
    out.sort_unstable();
    out
}

impl ScoreTable {
    /// Builds a table by evaluating `score(node, parents)` on each admissible
    /// family. Scores must be finite.
    pub fn from_fn<F>(
        node_count: usize,
        max_parents: usize,
        blacklist: Blacklist,
        budget: usize,
        exec: Execution,
        score: F,
    ) -> Result<Self>
    where
        F: Fn(usize, NodeSet) -> Result<f64> + Sync + Send,
    {
        if blacklist.node_count() != node_count {
            return Err(Error::NodeCountMismatch(blacklist.node_count(), node_count));
        }
        let all = full_set(node_count);
        let candidates: Vec<NodeSet> = (0..node_count)
            .map(|v| all & !bit(v) & !blacklist.forbidden_parents(v))
            .collect();
        let needed: u128 = candidates
            .iter()
            .map(|&c| (0..=max_parents).map(|k| binomial(c.count_ones() as usize, k)).sum::<u128>())
            .sum();
        if needed > budget as u128 {
            return Err(Error::TableBudgetExceeded { needed, budget });
        }
        let families: Vec<(usize, NodeSet)> = candidates
            .iter()
            .enumerate()
            .flat_map(|(v, &c)| subsets_up_to(c, max_parents).into_iter().map(move |p| (v, p)))
            .collect();
        let scores = map_indexed(families.len(), exec, |i| {
            let (v, p) = families[i];
            score(v, p)
        });
        let mut entries: Vec<Vec<(NodeSet, f64)>> = vec![Vec::new(); node_count];
        for (&(v, p), s) in families.iter().zip(scores) {
            let s = s?;
            if !s.is_finite() {
                return Err(Error::InvalidDataset(format!(
                    "non-finite local score for node {v} with parents {p:#b}"
                )));
            }
            entries[v].push((p, s));
        }
        let lookup = if node_count <= DENSE_LOOKUP_MAX_NODES {
            let mut dense = vec![vec![u32::MAX; 1 << node_count]; node_count];
            for (v, list) in entries.iter().enumerate() {
                for (i, &(p, _)) in list.iter().enumerate() {
                    dense[v][p as usize] = i as u32;
                }
            }
            Lookup::Dense(dense)
        } else {
            Lookup::Hashed(
                entries
                    .iter()
                    .map(|list| list.iter().enumerate().map(|(i, &(p, _))| (p, i as u32)).collect())
                    .collect(),
            )
        };
        Ok(Self { node_count, max_parents, blacklist, entries, lookup })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn max_parents(&self) -> usize {
        self.max_parents
    }

    pub fn blacklist(&self) -> &Blacklist {
        &self.blacklist
    }

    /// `(parents, score)` pairs of `node`, ascending by mask.
    pub fn entries(&self, node: usize) -> &[(NodeSet, f64)] {
        &self.entries[node]
    }

    pub fn len(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, node: usize, parents: NodeSet) -> Option<f64> {
        if node >= self.node_count {
            return None;
        }
        let idx = match &self.lookup {
            Lookup::Dense(d) => {
                let i = *d[node].get(usize::try_from(parents).ok()?)?;
                (i != u32::MAX).then_some(i)
            }
            Lookup::Hashed(h) => h[node].get(&parents).copied(),
        }?;
        Some(self.entries[node][idx as usize].1)
    }

    pub fn lookup(&self, node: usize, parents: NodeSet) -> Result<f64> {
        self.get(node, parents).ok_or(Error::MissingTableEntry { node, parents })
    }

    /// Sum of the cached family scores of `dag`, in node order.
    pub fn dag_score(&self, dag: &Dag) -> Result<f64> {
        if dag.node_count() != self.node_count {
            return Err(Error::NodeCountMismatch(dag.node_count(), self.node_count));
        }
        let mut total = 0.0;
        for v in 0..self.node_count {
            total += self.lookup(v, dag.parents(v))?;
        }
        Ok(total)
    }
}

/// Caches `scorer` over every family admissible under `blacklist` and the
/// parent cap in `opts`.
pub fn build_score_table<S: LocalScore + ?Sized>(
    scorer: &S,
    blacklist: &Blacklist,
    opts: &TableOptions,
) -> Result<ScoreTable> {
    let n = scorer.node_count();
    let cap = opts.max_parents.unwrap_or_else(|| default_max_parents(n)).min(n.saturating_sub(1));
    ScoreTable::from_fn(n, cap, blacklist.clone(), opts.budget, opts.exec, |v, p| {
        scorer.local_score(v, p)
    })
}
