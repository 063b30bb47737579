//! Metropolis-Hastings over ordered partitions, with one DAG drawn from the
//! conditional distribution at each kept iteration.
//!
//! Proposals mix four moves: split a block in two, merge two adjacent
//! blocks, relocate one node (into another block or a new singleton at any
//! gap), and swap two nodes in different blocks. Distinct moves can reach the
//! same neighbour, so the Hastings ratio uses the exact proposal probability
//! summed over every move that links the two states.

use super::{ChainConfig, MoveWeights, PosteriorSamples, Sample};
use crate::error::{Error, Result};
use crate::graph::{bit, members, Dag, NodeSet, OrderedPartition};
use crate::scores::ScoreTable;
use rand::Rng;

const SPLIT: usize = 0;
const MERGE: usize = 1;
const RELOCATE: usize = 2;
const SWAP: usize = 3;

/// Parent-set context of a node: nodes in later blocks and in the next block.
/// Last-block nodes have `(0, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Context {
    later: NodeSet,
    next: NodeSet,
}

fn contexts(blocks: &[NodeSet], n: usize, out: &mut Vec<Context>) {
    out.clear();
    out.resize(n, Context { later: 0, next: 0 });
    let mut later = 0;
    let mut next = 0;
    for &b in blocks.iter().rev() {
        for v in members(b) {
            out[v] = Context { later, next };
        }
        later |= b;
        next = b;
    }
}

fn admissible(parents: NodeSet, ctx: Context) -> bool {
    parents & !ctx.later == 0 && parents & ctx.next != 0
}

/// `ln Σ exp(score)` over the admissible parent sets of `v` in `ctx`.
fn node_log_score(table: &ScoreTable, v: usize, ctx: Context) -> Result<f64> {
    if ctx.later == 0 {
        return table.lookup(v, 0);
    }
    let entries = table.entries(v);
    let mut max = f64::NEG_INFINITY;
    for &(p, s) in entries {
        if admissible(p, ctx) && s > max {
            max = s;
        }
    }
    if max == f64::NEG_INFINITY {
        return Ok(max);
    }
    let mut sum = 0.0;
    for &(p, s) in entries {
        if admissible(p, ctx) {
            sum += (s - max).exp();
        }
    }
    Ok(max + sum.ln())
}

fn check_cap(table: &ScoreTable, blocks: usize) -> Result<()> {
    if blocks >= 2 && table.max_parents() == 0 {
        return Err(Error::PartitionBeyondCap);
    }
    Ok(())
}

/// Log of the summed score of every DAG compatible with `partition`;
/// `-inf` when some node has no admissible parent set in the table.
pub fn partition_log_score(partition: &OrderedPartition, table: &ScoreTable) -> Result<f64> {
    if partition.node_count() != table.node_count() {
        return Err(Error::NodeCountMismatch(partition.node_count(), table.node_count()));
    }
    check_cap(table, partition.blocks().len())?;
    let mut ctx = Vec::new();
    contexts(partition.blocks(), partition.node_count(), &mut ctx);
    let mut total = 0.0;
    for (v, &c) in ctx.iter().enumerate() {
        total += node_log_score(table, v, c)?;
    }
    Ok(total)
}

fn draw_parents<R: Rng + ?Sized>(
    table: &ScoreTable,
    v: usize,
    ctx: Context,
    log_norm: f64,
    rng: &mut R,
) -> NodeSet {
    if ctx.later == 0 {
        return 0;
    }
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for &(p, s) in table.entries(v) {
        if admissible(p, ctx) {
            acc += (s - log_norm).exp();
            last = p;
            if u < acc {
                return p;
            }
        }
    }
    last
}

/// Draws a DAG compatible with `partition`, each node's parent set with
/// probability proportional to its exponentiated local score.
pub fn sample_dag_given_partition<R: Rng + ?Sized>(
    partition: &OrderedPartition,
    table: &ScoreTable,
    rng: &mut R,
) -> Result<Dag> {
    if partition.node_count() != table.node_count() {
        return Err(Error::NodeCountMismatch(partition.node_count(), table.node_count()));
    }
    check_cap(table, partition.blocks().len())?;
    let n = partition.node_count();
    let mut ctx = Vec::new();
    contexts(partition.blocks(), n, &mut ctx);
    let mut parents = Vec::with_capacity(n);
    for (v, &c) in ctx.iter().enumerate() {
        let norm = node_log_score(table, v, c)?;
        if norm == f64::NEG_INFINITY {
            return Err(Error::InvalidPartition(format!(
                "node {v} has no admissible parent set under the blacklist"
            )));
        }
        parents.push(draw_parents(table, v, c, norm, rng));
    }
    Ok(Dag::from_parent_sets_unchecked(parents))
}

/// Move-type probabilities in state `blocks`, renormalised over the moves
/// that are possible there.
fn type_probs(blocks: &[NodeSet], n: usize, w: &MoveWeights) -> [f64; 4] {
    let m = blocks.len();
    let available = [
        blocks.iter().any(|b| b.count_ones() >= 2),
        m >= 2,
        n >= 2,
        m >= 2,
    ];
    let mut p = w.as_array();
    for (pi, ok) in p.iter_mut().zip(available) {
        if !ok {
            *pi = 0.0;
        }
    }
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        for pi in &mut p {
            *pi /= total;
        }
    }
    p
}

fn splittable_count(blocks: &[NodeSet]) -> usize {
    blocks.iter().filter(|b| b.count_ones() >= 2).count()
}

fn cross_pairs(blocks: &[NodeSet], n: usize) -> usize {
    let sq: usize = blocks.iter().map(|b| (b.count_ones() as usize).pow(2)).sum();
    (n * n - sq) / 2
}

/// Blocks with `v` removed and emptied blocks dropped.
fn strip(blocks: &[NodeSet], v: usize, out: &mut Vec<NodeSet>) {
    out.clear();
    out.extend(blocks.iter().map(|b| b & !bit(v)).filter(|&b| b != 0));
}

fn block_of(blocks: &[NodeSet], v: usize) -> usize {
    blocks.iter().position(|b| b & bit(v) != 0).expect("node is in some block")
}

/// Index `i` where `longer` splits `shorter[i]` into `longer[i], longer[i+1]`.
fn split_index(shorter: &[NodeSet], longer: &[NodeSet]) -> Option<usize> {
    if longer.len() != shorter.len() + 1 {
        return None;
    }
    let i = shorter.iter().zip(longer).position(|(a, b)| a != b)?;
    let ok = longer[i] | longer[i + 1] == shorter[i] && shorter[i + 1..] == longer[i + 2..];
    ok.then_some(i)
}

fn is_swap(x: &[NodeSet], y: &[NodeSet]) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let mut diffs = x.iter().zip(y).enumerate().filter(|(_, (a, b))| a != b);
    let (Some((i, _)), Some((j, _)), None) = (diffs.next(), diffs.next(), diffs.next()) else {
        return false;
    };
    let d = x[i] ^ y[i];
    d.count_ones() == 2
        && d == x[j] ^ y[j]
        && x[i].count_ones() == y[i].count_ones()
        && x[j].count_ones() == y[j].count_ones()
}

fn proposal_prob_blocks(x: &[NodeSet], y: &[NodeSet], n: usize, w: &MoveWeights) -> f64 {
    if x == y {
        return 0.0;
    }
    let tp = type_probs(x, n, w);
    let mut q = 0.0;
    if tp[SPLIT] > 0.0 {
        if let Some(i) = split_index(x, y) {
            let k = x[i].count_ones() as i32;
            q += tp[SPLIT] / splittable_count(x) as f64 / (2f64.powi(k) - 2.0);
        }
    }
    if tp[MERGE] > 0.0 && split_index(y, x).is_some() {
        q += tp[MERGE] / (x.len() - 1) as f64;
    }
    if tp[RELOCATE] > 0.0 && x.len().abs_diff(y.len()) <= 1 {
        let mut sx = Vec::with_capacity(x.len());
        let mut sy = Vec::with_capacity(y.len());
        for v in 0..n {
            strip(x, v, &mut sx);
            strip(y, v, &mut sy);
            if sx == sy {
                q += tp[RELOCATE] / (n as f64 * 2.0 * sx.len() as f64);
            }
        }
    }
    if tp[SWAP] > 0.0 && is_swap(x, y) {
        q += tp[SWAP] / cross_pairs(x, n) as f64;
    }
    q
}

/// Probability that one proposal step moves `x` to `y`, summed over all move
/// types and choices that produce `y`. Zero for `x == y`.
pub fn proposal_prob(x: &OrderedPartition, y: &OrderedPartition, weights: &MoveWeights) -> f64 {
    if x.node_count() != y.node_count() {
        return 0.0;
    }
    proposal_prob_blocks(x.blocks(), y.blocks(), x.node_count(), weights)
}

fn pick_type<R: Rng + ?Sized>(tp: &[f64; 4], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (t, &p) in tp.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = t;
            if u < acc {
                return t;
            }
        }
    }
    last
}

/// Writes a neighbour of `x` into `y`. Returns false when `x` has no moves.
fn propose_blocks<R: Rng + ?Sized>(
    x: &[NodeSet],
    n: usize,
    w: &MoveWeights,
    y: &mut Vec<NodeSet>,
    rng: &mut R,
) -> bool {
    let tp = type_probs(x, n, w);
    if tp.iter().all(|&p| p == 0.0) {
        return false;
    }
    y.clear();
    let m = x.len();
    match pick_type(&tp, rng) {
        SPLIT => {
            let target = rng.random_range(0..splittable_count(x));
            let i = x
                .iter()
                .enumerate()
                .filter(|(_, b)| b.count_ones() >= 2)
                .nth(target)
                .map(|(i, _)| i)
                .expect("splittable block exists");
            let k = x[i].count_ones();
            let pattern: u64 = if k < 64 {
                rng.random_range(1..(1u64 << k) - 1)
            } else {
                loop {
                    let r: u64 = rng.random();
                    if r != 0 && r != u64::MAX {
                        break r;
                    }
                }
            };
            let first = members(x[i])
                .enumerate()
                .filter(|(j, _)| pattern & (1 << j) != 0)
                .fold(0, |acc, (_, v)| acc | bit(v));
            y.extend_from_slice(&x[..i]);
            y.push(first);
            y.push(x[i] & !first);
            y.extend_from_slice(&x[i + 1..]);
        }
        MERGE => {
            let i = rng.random_range(0..m - 1);
            y.extend_from_slice(&x[..i]);
            y.push(x[i] | x[i + 1]);
            y.extend_from_slice(&x[i + 2..]);
        }
        RELOCATE => {
            let v = rng.random_range(0..n);
            let home = block_of(x, v);
            let was_singleton = x[home].count_ones() == 1;
            strip(x, v, y);
            let m_stripped = y.len();
            let current = if was_singleton { 2 * home } else { 2 * home + 1 };
            let mut option = rng.random_range(0..2 * m_stripped);
            if option >= current {
                option += 1;
            }
            if option % 2 == 0 {
                y.insert(option / 2, bit(v));
            } else {
                y[option / 2] |= bit(v);
            }
        }
        _ => {
            let (u, v) = loop {
                let u = rng.random_range(0..n);
                let v = rng.random_range(0..n);
                if block_of(x, u) != block_of(x, v) {
                    break (u, v);
                }
            };
            let (bu, bv) = (block_of(x, u), block_of(x, v));
            y.extend_from_slice(x);
            y[bu] = (y[bu] & !bit(u)) | bit(v);
            y[bv] = (y[bv] & !bit(v)) | bit(u);
        }
    }
    true
}

/// Proposes a neighbour of `partition` and returns it with the log Hastings
/// ratio `ln q(new -> old) - ln q(old -> new)`. A partition with no possible
/// move (one node) is returned unchanged with ratio 0.
pub fn propose_partition_move<R: Rng + ?Sized>(
    partition: &OrderedPartition,
    weights: &MoveWeights,
    rng: &mut R,
) -> (OrderedPartition, f64) {
    let n = partition.node_count();
    let x = partition.blocks();
    let mut y = Vec::with_capacity(x.len() + 1);
    if !propose_blocks(x, n, weights, &mut y, rng) {
        return (partition.clone(), 0.0);
    }
    let ratio = proposal_prob_blocks(&y, x, n, weights).ln()
        - proposal_prob_blocks(x, &y, n, weights).ln();
    (OrderedPartition::from_blocks_unchecked(n, y), ratio)
}

/// Partition MCMC started from the single-block partition. One DAG is drawn
/// from the current partition at every kept iteration.
pub fn partition_mcmc<R: Rng + ?Sized>(
    table: &ScoreTable,
    cfg: &ChainConfig,
    rng: &mut R,
) -> Result<PosteriorSamples> {
    cfg.validate()?;
    let n = table.node_count();
    if n >= 2 {
        check_cap(table, 2)?;
    }
    let mut x: Vec<NodeSet> = vec![crate::graph::full_set(n)];
    let mut ctx_x = Vec::with_capacity(n);
    contexts(&x, n, &mut ctx_x);
    let mut node_x = ctx_x
        .iter()
        .enumerate()
        .map(|(v, &c)| node_log_score(table, v, c))
        .collect::<Result<Vec<f64>>>()?;
    let mut total_x: f64 = node_x.iter().sum();

    let mut y = Vec::with_capacity(n + 1);
    let mut ctx_y = Vec::with_capacity(n);
    let mut node_y = vec![0.0; n];
    let mut samples = Vec::with_capacity(cfg.kept_count());
    let (mut proposals, mut accepted) = (0usize, 0usize);

    for iteration in 1..=cfg.iterations {
        if propose_blocks(&x, n, &cfg.moves, &mut y, rng) {
            proposals += 1;
            contexts(&y, n, &mut ctx_y);
            let mut total_y = 0.0;
            for v in 0..n {
                node_y[v] = if ctx_y[v] == ctx_x[v] {
                    node_x[v]
                } else {
                    node_log_score(table, v, ctx_y[v])?
                };
                total_y += node_y[v];
            }
            let u: f64 = rng.random();
            if total_y > f64::NEG_INFINITY {
                let log_alpha = total_y - total_x + proposal_prob_blocks(&y, &x, n, &cfg.moves).ln()
                    - proposal_prob_blocks(&x, &y, n, &cfg.moves).ln();
                if u.ln() < log_alpha {
                    accepted += 1;
                    std::mem::swap(&mut x, &mut y);
                    std::mem::swap(&mut ctx_x, &mut ctx_y);
                    std::mem::swap(&mut node_x, &mut node_y);
                    total_x = total_y;
                }
            }
        }
        if cfg.keeps(iteration) {
            let parents: Vec<NodeSet> = (0..n)
                .map(|v| draw_parents(table, v, ctx_x[v], node_x[v], rng))
                .collect();
            let dag = Dag::from_parent_sets_unchecked(parents);
            let log_score = table.dag_score(&dag)?;
            samples.push(Sample { iteration, dag, log_score });
        }
    }
    Ok(PosteriorSamples { samples, proposals, accepted })
}
