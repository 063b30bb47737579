//! Metropolis-Hastings over DAGs with single-edge additions, deletions and
//! reversals drawn uniformly from the valid neighbours.

use super::{ChainConfig, PosteriorSamples, Sample};
use crate::error::Result;
use crate::graph::{bit, members, Dag, NodeSet};
use crate::scores::ScoreTable;
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum EdgeMove {
    Add(usize, usize),
    Delete(usize, usize),
    Reverse(usize, usize),
}

/// `reach[v]`: nodes reachable from `v`, including `v`.
fn reachability(parents: &[NodeSet], reach: &mut Vec<NodeSet>) {
    let n = parents.len();
    reach.clear();
    reach.extend((0..n).map(bit));
    loop {
        let mut changed = false;
        for c in 0..n {
            for p in members(parents[c]) {
                let merged = reach[p] | reach[c];
                if merged != reach[p] {
                    reach[p] = merged;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Valid single-edge changes of `parents` that stay acyclic, avoid the
/// table's blacklist and respect its parent cap.
fn neighbourhood(
    parents: &[NodeSet],
    table: &ScoreTable,
    reach: &mut Vec<NodeSet>,
    out: &mut Vec<EdgeMove>,
) {
    let n = parents.len();
    let cap = table.max_parents() as u32;
    let bl = table.blacklist();
    reachability(parents, reach);
    out.clear();
    for v in 0..n {
        for u in 0..n {
            if u == v {
                continue;
            }
            if parents[v] & bit(u) != 0 {
                out.push(EdgeMove::Delete(u, v));
                // Reversal is acyclic unless another path u -> ... -> v exists.
                let other_path = members(children_of(parents, u) & !bit(v)).any(|c| reach[c] & bit(v) != 0);
                if !other_path && !bl.forbids(v, u) && parents[u].count_ones() < cap {
                    out.push(EdgeMove::Reverse(u, v));
                }
            } else if reach[v] & bit(u) == 0
                && !bl.forbids(u, v)
                && parents[v].count_ones() < cap
            {
                out.push(EdgeMove::Add(u, v));
            }
        }
    }
}

fn children_of(parents: &[NodeSet], u: usize) -> NodeSet {
    parents.iter().enumerate().filter(|(_, p)| *p & bit(u) != 0).fold(0, |a, (c, _)| a | bit(c))
}

/// Number of valid single-edge neighbours of `dag` under `table`.
pub fn structure_neighbourhood_size(dag: &Dag, table: &ScoreTable) -> usize {
    let mut reach = Vec::new();
    let mut out = Vec::new();
    neighbourhood(dag.parent_sets(), table, &mut reach, &mut out);
    out.len()
}

fn apply(parents: &mut [NodeSet], mv: EdgeMove) {
    match mv {
        EdgeMove::Add(u, v) => parents[v] |= bit(u),
        EdgeMove::Delete(u, v) => parents[v] &= !bit(u),
        EdgeMove::Reverse(u, v) => {
            parents[v] &= !bit(u);
            parents[u] |= bit(v);
        }
    }
}

/// Structure MCMC started from the empty graph.
pub fn structure_mcmc<R: Rng + ?Sized>(
    table: &ScoreTable,
    cfg: &ChainConfig,
    rng: &mut R,
) -> Result<PosteriorSamples> {
    cfg.validate()?;
    let n = table.node_count();
    let mut x = vec![0 as NodeSet; n];
    let mut local: Vec<f64> = (0..n).map(|v| table.lookup(v, 0)).collect::<Result<_>>()?;
    let mut total: f64 = local.iter().sum();
    let mut reach = Vec::with_capacity(n);
    let mut nb_x = Vec::new();
    let mut nb_y = Vec::new();
    neighbourhood(&x, table, &mut reach, &mut nb_x);
    let mut y = x.clone();
    let mut samples = Vec::with_capacity(cfg.kept_count());
    let (mut proposals, mut accepted) = (0usize, 0usize);

    for iteration in 1..=cfg.iterations {
        if !nb_x.is_empty() {
            proposals += 1;
            let mv = nb_x[rng.random_range(0..nb_x.len())];
            y.copy_from_slice(&x);
            apply(&mut y, mv);
            let changed: [Option<usize>; 2] = match mv {
                EdgeMove::Add(_, v) | EdgeMove::Delete(_, v) => [Some(v), None],
                EdgeMove::Reverse(u, v) => [Some(v), Some(u)],
            };
            let mut delta = 0.0;
            let mut new_local = [(0usize, 0.0f64); 2];
            for (slot, v) in changed.iter().enumerate() {
                if let Some(v) = *v {
                    let s = table.lookup(v, y[v])?;
                    delta += s - local[v];
                    new_local[slot] = (v, s);
                }
            }
            neighbourhood(&y, table, &mut reach, &mut nb_y);
            let log_alpha = delta + (nb_x.len() as f64).ln() - (nb_y.len() as f64).ln();
            let u: f64 = rng.random();
            if u.ln() < log_alpha {
                accepted += 1;
                std::mem::swap(&mut x, &mut y);
                std::mem::swap(&mut nb_x, &mut nb_y);
                for (slot, v) in changed.iter().enumerate() {
                    if v.is_some() {
                        let (v, s) = new_local[slot];
                        local[v] = s;
                    }
                }
                total += delta;
            }
        }
        if cfg.keeps(iteration) {
            let dag = Dag::from_parent_sets_unchecked(x.clone());
            // Recomputed in node order so stored scores match the table sum exactly.
            let log_score = table.dag_score(&dag)?;
            debug_assert!((log_score - total).abs() < 1e-6 * (1.0 + total.abs()));
            samples.push(Sample { iteration, dag, log_score });
        }
    }
    Ok(PosteriorSamples { samples, proposals, accepted })
}
