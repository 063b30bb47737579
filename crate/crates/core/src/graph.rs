//! DAGs, CPDAGs, ordered partitions and the distances between them.
//!
//! Node identity is positional. Parent sets are stored as `u64` bit masks,
//! which caps graphs at [`MAX_NODES`] nodes.

use crate::error::{Error, Result};
use std::collections::BTreeSet;
use std::fmt;

pub const MAX_NODES: usize = 64;

/// A set of nodes as a bit mask.
pub type NodeSet = u64;

#[inline]
pub fn bit(node: usize) -> NodeSet {
    1u64 << node
}

/// Iterates the node indices in a mask in increasing order.
pub fn members(mut set: NodeSet) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let i = set.trailing_zeros() as usize;
            set &= set - 1;
            Some(i)
        }
    })
}

#[inline]
pub fn full_set(node_count: usize) -> NodeSet {
    if node_count >= 64 {
        u64::MAX
    } else {
        (1u64 << node_count) - 1
    }
}

fn check_node_count(n: usize) -> Result<()> {
    if n > MAX_NODES {
        return Err(Error::TooManyNodes(n));
    }
    Ok(())
}

/// Directed acyclic graph over `0..node_count`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    parents: Vec<NodeSet>,
}

impl Dag {
    pub fn empty(node_count: usize) -> Result<Self> {
        check_node_count(node_count)?;
        Ok(Self { parents: vec![0; node_count] })
    }

    /// Builds a DAG from `(parent, child)` pairs, rejecting self-loops,
    /// duplicates and cycles.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut dag = Self::empty(node_count)?;
        for (from, to) in edges {
            for node in [from, to] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if from == to {
                return Err(Error::SelfLoop(from));
            }
            if dag.parents[to] & bit(from) != 0 {
                return Err(Error::DuplicateEdge(from, to));
            }
            dag.parents[to] |= bit(from);
        }
        if !is_acyclic(&dag.parents) {
            return Err(Error::Cycle);
        }
        Ok(dag)
    }

    pub fn from_parent_sets(parents: Vec<NodeSet>) -> Result<Self> {
        let n = parents.len();
        check_node_count(n)?;
        let full = full_set(n);
        for (v, &p) in parents.iter().enumerate() {
            if p & !full != 0 {
                let node = members(p & !full).next().unwrap_or(n);
                return Err(Error::NodeOutOfRange { node, node_count: n });
            }
            if p & bit(v) != 0 {
                return Err(Error::SelfLoop(v));
            }
        }
        if !is_acyclic(&parents) {
            return Err(Error::Cycle);
        }
        Ok(Self { parents })
    }

    /// Caller guarantees acyclicity (e.g. parents drawn from later partition
    /// blocks).
    pub(crate) fn from_parent_sets_unchecked(parents: Vec<NodeSet>) -> Self {
        debug_assert!(is_acyclic(&parents));
        Self { parents }
    }

    pub fn node_count(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self, node: usize) -> NodeSet {
        self.parents[node]
    }

    pub fn parent_sets(&self) -> &[NodeSet] {
        &self.parents
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.parents[to] & bit(from) != 0
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(|p| p.count_ones() as usize).sum()
    }

    /// Edges sorted lexicographically by `(from, to)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.node_count();
        let mut out = Vec::with_capacity(self.edge_count());
        for from in 0..n {
            for to in 0..n {
                if self.has_edge(from, to) {
                    out.push((from, to));
                }
            }
        }
        out
    }

    pub fn children(&self, node: usize) -> NodeSet {
        self.parents
            .iter()
            .enumerate()
            .filter(|(_, p)| *p & bit(node) != 0)
            .fold(0, |acc, (c, _)| acc | bit(c))
    }

    /// True when `to` is reachable from `from` along directed edges.
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        reaches(&self.parents, from, to)
    }

    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        skeleton(self)
    }
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dag({}; {:?})", self.node_count(), self.edges())
    }
}

/// Kahn's algorithm on parent masks.
pub(crate) fn is_acyclic(parents: &[NodeSet]) -> bool {
    let n = parents.len();
    let mut removed: NodeSet = 0;
    let mut progress = true;
    while progress {
        progress = false;
        for v in 0..n {
            if removed & bit(v) == 0 && parents[v] & !removed == 0 {
                removed |= bit(v);
                progress = true;
            }
        }
    }
    removed == full_set(n)
}

/// Directed reachability from `from` to `to` (walks child links).
pub(crate) fn reaches(parents: &[NodeSet], from: usize, to: usize) -> bool {
    if from == to {
        return true;
    }
    let n = parents.len();
    let mut seen = bit(from);
    let mut frontier = bit(from);
    while frontier != 0 {
        let mut next = 0;
        for c in 0..n {
            if seen & bit(c) == 0 && parents[c] & frontier != 0 {
                next |= bit(c);
            }
        }
        if next & bit(to) != 0 {
            return true;
        }
        seen |= next;
        frontier = next;
    }
    false
}

/// Unordered node pairs `(min, max)` joined by an edge in either direction.
pub fn skeleton(dag: &Dag) -> BTreeSet<(usize, usize)> {
    dag.edges().into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect()
}

/// Canonical representative of a Markov equivalence class: compelled edges
/// directed, reversible edges undirected.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Cpdag {
    node_count: usize,
    directed: BTreeSet<(usize, usize)>,
    undirected: BTreeSet<(usize, usize)>,
}

/// How an adjacency appears in a CPDAG.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeMark {
    Forward,
    Backward,
    Undirected,
}

impl Cpdag {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn directed(&self) -> &BTreeSet<(usize, usize)> {
        &self.directed
    }

    /// Undirected edges as `(min, max)` pairs.
    pub fn undirected(&self) -> &BTreeSet<(usize, usize)> {
        &self.undirected
    }

    /// Orientation of the adjacency `{a, b}` read from `a` to `b`.
    pub fn mark(&self, a: usize, b: usize) -> Option<EdgeMark> {
        if self.directed.contains(&(a, b)) {
            Some(EdgeMark::Forward)
        } else if self.directed.contains(&(b, a)) {
            Some(EdgeMark::Backward)
        } else if self.undirected.contains(&(a.min(b), a.max(b))) {
            Some(EdgeMark::Undirected)
        } else {
            None
        }
    }
}

/// Skeleton + v-structures, then Meek rules R1–R3 to closure.
pub fn cpdag(dag: &Dag) -> Cpdag {
    let n = dag.node_count();
    let mut adj = vec![0u64; n];
    for (a, b) in dag.edges() {
        adj[a] |= bit(b);
        adj[b] |= bit(a);
    }
    // dir[a] holds the compelled children of a.
    let mut dir = vec![0u64; n];
    for b in 0..n {
        let pa: Vec<usize> = members(dag.parents(b)).collect();
        for (i, &a) in pa.iter().enumerate() {
            for &c in &pa[i + 1..] {
                if adj[a] & bit(c) == 0 {
                    dir[a] |= bit(b);
                    dir[c] |= bit(b);
                }
            }
        }
    }
    let oriented = |dir: &[u64], a: usize, b: usize| dir[a] & bit(b) != 0;
    let undirected = |dir: &[u64], a: usize, b: usize| {
        adj[a] & bit(b) != 0 && dir[a] & bit(b) == 0 && dir[b] & bit(a) == 0
    };
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in members(adj[a]) {
                if !undirected(&dir, a, b) {
                    continue;
                }
                // R1: c -> a, c not adjacent to b  =>  a -> b
                let r1 = (0..n).any(|c| c != b && oriented(&dir, c, a) && adj[c] & bit(b) == 0);
                // R2: a -> c -> b  =>  a -> b
                let r2 = members(dir[a]).any(|c| oriented(&dir, c, b));
                // R3: a - c1 -> b, a - c2 -> b, c1, c2 non-adjacent  =>  a -> b
                let r3 = {
                    let cands: Vec<usize> = members(adj[a])
                        .filter(|&c| c != b && undirected(&dir, a, c) && oriented(&dir, c, b))
                        .collect();
                    cands.iter().enumerate().any(|(i, &c1)| {
                        cands[i + 1..].iter().any(|&c2| adj[c1] & bit(c2) == 0)
                    })
                };
                if r1 || r2 || r3 {
                    dir[a] |= bit(b);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut directed = BTreeSet::new();
    let mut und = BTreeSet::new();
    for (a, b) in dag.edges() {
        if oriented(&dir, a, b) {
            directed.insert((a, b));
        } else if oriented(&dir, b, a) {
            directed.insert((b, a));
        } else {
            und.insert((a.min(b), a.max(b)));
        }
    }
    Cpdag { node_count: n, directed, undirected: und }
}

/// Structural Hamming distance: FN + FP on skeletons plus the shared
/// adjacencies whose CPDAG orientation differs.
pub fn shd(estimate: &Dag, truth: &Dag) -> Result<usize> {
    if estimate.node_count() != truth.node_count() {
        return Err(Error::NodeCountMismatch(estimate.node_count(), truth.node_count()));
    }
    let se = skeleton(estimate);
    let st = skeleton(truth);
    let fp = se.difference(&st).count();
    let fn_ = st.difference(&se).count();
    let ce = cpdag(estimate);
    let ct = cpdag(truth);
    let misoriented = se
        .intersection(&st)
        .filter(|&&(a, b)| ce.mark(a, b) != ct.mark(a, b))
        .count();
    Ok(fp + fn_ + misoriented)
}

/// An ordered set partition of the nodes. Block 0 is listed first; the last
/// block holds the outpoints (parentless nodes).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OrderedPartition {
    node_count: usize,
    blocks: Vec<NodeSet>,
}

impl OrderedPartition {
    pub fn from_blocks(node_count: usize, blocks: Vec<NodeSet>) -> Result<Self> {
        check_node_count(node_count)?;
        let mut seen = 0u64;
        for &b in &blocks {
            if b == 0 {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            if b & seen != 0 {
                return Err(Error::InvalidPartition("node in two blocks".into()));
            }
            seen |= b;
        }
        if seen != full_set(node_count) {
            return Err(Error::InvalidPartition("blocks do not cover all nodes".into()));
        }
        Ok(Self { node_count, blocks })
    }

    pub(crate) fn from_blocks_unchecked(node_count: usize, blocks: Vec<NodeSet>) -> Self {
        Self { node_count, blocks }
    }

    /// Builds a partition from a permutation and block sizes.
    pub fn from_permutation(permutation: &[usize], block_sizes: &[usize]) -> Result<Self> {
        let n = permutation.len();
        check_node_count(n)?;
        if block_sizes.contains(&0) || block_sizes.iter().sum::<usize>() != n {
            return Err(Error::InvalidPartition("block sizes must be positive and sum to n".into()));
        }
        let mut blocks = Vec::with_capacity(block_sizes.len());
        let mut it = permutation.iter();
        for &s in block_sizes {
            let mut b = 0u64;
            for &v in it.by_ref().take(s) {
                if v >= n {
                    return Err(Error::NodeOutOfRange { node: v, node_count: n });
                }
                b |= bit(v);
            }
            blocks.push(b);
        }
        Self::from_blocks(n, blocks)
    }

    /// All nodes in one block (compatible only with the empty graph).
    pub fn single_block(node_count: usize) -> Result<Self> {
        check_node_count(node_count)?;
        Ok(Self { node_count, blocks: vec![full_set(node_count)] })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn blocks(&self) -> &[NodeSet] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.count_ones() as usize).collect()
    }

    /// Blocks concatenated in order, nodes ascending within a block.
    pub fn permutation(&self) -> Vec<usize> {
        self.blocks.iter().flat_map(|&b| members(b)).collect()
    }

    /// Membership of `dag` in this partition's DAG set: every node outside
    /// the last block has all parents in later blocks and at least one in the
    /// next block; last-block nodes are parentless.
    pub fn is_compatible(&self, dag: &Dag) -> bool {
        if dag.node_count() != self.node_count {
            return false;
        }
        let m = self.blocks.len();
        let mut later = 0u64;
        for i in (0..m).rev() {
            let block = self.blocks[i];
            for v in members(block) {
                let pa = dag.parents(v);
                if i + 1 == m {
                    if pa != 0 {
                        return false;
                    }
                } else if pa & !later != 0 || pa & self.blocks[i + 1] == 0 {
                    return false;
                }
            }
            later |= block;
        }
        true
    }
}

/// Peels outpoints layer by layer; the last-removed layer is listed first.
pub fn dag_to_partition(dag: &Dag) -> OrderedPartition {
    let n = dag.node_count();
    let mut removed = 0u64;
    let mut layers = Vec::new();
    while removed != full_set(n) {
        let layer = (0..n)
            .filter(|&v| removed & bit(v) == 0 && dag.parents(v) & !removed == 0)
            .fold(0u64, |acc, v| acc | bit(v));
        debug_assert!(layer != 0, "acyclic graphs always have an outpoint");
        layers.push(layer);
        removed |= layer;
    }
    layers.reverse();
    OrderedPartition::from_blocks_unchecked(n, layers)
}

/// Forbidden directed edges, stored as forbidden parents per child.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Blacklist {
    forbidden_parents: Vec<NodeSet>,
}

impl Blacklist {
    pub fn none(node_count: usize) -> Self {
        Self { forbidden_parents: vec![0; node_count] }
    }

    pub fn new<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        check_node_count(node_count)?;
        let mut bl = Self::none(node_count);
        for (from, to) in edges {
            for node in [from, to] {
                if node >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            bl.forbidden_parents[to] |= bit(from);
        }
        Ok(bl)
    }

    pub fn node_count(&self) -> usize {
        self.forbidden_parents.len()
    }

    pub fn forbids(&self, from: usize, to: usize) -> bool {
        self.forbidden_parents.get(to).is_some_and(|p| p & bit(from) != 0)
    }

    pub fn forbidden_parents(&self, child: usize) -> NodeSet {
        self.forbidden_parents.get(child).copied().unwrap_or(0)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (to, &p) in self.forbidden_parents.iter().enumerate() {
            out.extend(members(p).map(|from| (from, to)));
        }
        out.sort_unstable();
        out
    }

    pub fn len(&self) -> usize {
        self.forbidden_parents.iter().map(|p| p.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True when `dag` contains none of the forbidden edges.
    pub fn admits(&self, dag: &Dag) -> bool {
        (0..dag.node_count()).all(|v| dag.parents(v) & self.forbidden_parents(v) == 0)
    }
}
