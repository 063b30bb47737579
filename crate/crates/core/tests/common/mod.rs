#![allow(dead_code)]

use hbn_core::data::{Column, Dataset};
use hbn_core::graph::{bit, members, Dag, NodeSet};
use hbn_core::rng::{stream_rng, ChainRng};
use rand::Rng;

pub const NAMES: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

pub fn rng(seed: u64) -> ChainRng {
    stream_rng(seed, 0)
}

/// Every DAG on `n` nodes (brute force over parent-set assignments).
pub fn all_dags(n: usize) -> Vec<Dag> {
    let others: Vec<NodeSet> =
        (0..n).map(|v| ((1u64 << n) - 1) & !bit(v)).collect();
    let mut out = Vec::new();
    let mut parents = vec![0u64; n];
    fn rec(v: usize, others: &[NodeSet], parents: &mut Vec<NodeSet>, out: &mut Vec<Dag>) {
        if v == others.len() {
            if let Ok(d) = Dag::from_parent_sets(parents.clone()) {
                out.push(d);
            }
            return;
        }
        let mut sub = others[v];
        loop {
            parents[v] = sub;
            rec(v + 1, others, parents, out);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others[v];
        }
    }
    rec(0, &others, &mut parents, &mut out);
    out
}

/// Continuous data with random linear-Gaussian dependencies.
pub fn random_continuous(n: usize, rows: usize, rng: &mut ChainRng) -> Dataset {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let weights: Vec<f64> = (0..j).map(|_| rng.random_range(-1.5..1.5)).collect();
        let col: Vec<f64> = (0..rows)
            .map(|r| {
                let base: f64 = weights.iter().enumerate().map(|(k, w)| w * cols[k][r]).sum();
                base + gauss(rng) + 0.3
            })
            .collect();
        cols.push(col);
    }
    Dataset::new(cols.into_iter().enumerate().map(|(j, v)| Column::continuous(NAMES[j], v)).collect())
        .unwrap()
}

/// Categorical data with random levels and a dependence on the previous column.
pub fn random_categorical(n: usize, rows: usize, rng: &mut ChainRng) -> Dataset {
    let levels: Vec<usize> = (0..n).map(|_| rng.random_range(2..=3)).collect();
    let mut cols: Vec<Vec<u32>> = Vec::with_capacity(n);
    for j in 0..n {
        let col: Vec<u32> = (0..rows)
            .map(|r| {
                if j > 0 && rng.random::<f64>() < 0.5 {
                    cols[j - 1][r] % levels[j] as u32
                } else {
                    rng.random_range(0..levels[j] as u32)
                }
            })
            .collect();
        cols.push(col);
    }
    Dataset::new(
        cols.into_iter()
            .enumerate()
            .map(|(j, v)| Column::categorical(NAMES[j], levels[j], v))
            .collect(),
    )
    .unwrap()
}

pub fn gauss(rng: &mut ChainRng) -> f64 {
    // Box-Muller; adequate for test data.
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn ancestors(dag: &Dag, set: NodeSet) -> NodeSet {
    let mut anc = set;
    loop {
        let next = members(anc).fold(anc, |acc, v| acc | dag.parents(v));
        if next == anc {
            return anc;
        }
        anc = next;
    }
}

/// d-separation of `a` and `b` given `z`, via the moralized ancestral graph.
pub fn d_separated(dag: &Dag, a: usize, b: usize, z: NodeSet) -> bool {
    let n = dag.node_count();
    let keep = ancestors(dag, bit(a) | bit(b) | z);
    let mut adj = vec![0u64; n];
    for v in members(keep) {
        let pa: Vec<usize> = members(dag.parents(v)).collect();
        for &p in &pa {
            adj[v] |= bit(p);
            adj[p] |= bit(v);
        }
        for (i, &p) in pa.iter().enumerate() {
            for &q in &pa[i + 1..] {
                adj[p] |= bit(q);
                adj[q] |= bit(p);
            }
        }
    }
    let mut seen = bit(a);
    let mut frontier = bit(a);
    while frontier != 0 {
        let mut next = 0;
        for v in members(frontier) {
            next |= adj[v] & keep & !z & !seen;
        }
        if next & bit(b) != 0 {
            return false;
        }
        seen |= next;
        frontier = next;
    }
    true
}

/// Every d-separation statement of `dag`, as a sorted list.
pub fn independence_pattern(dag: &Dag) -> Vec<(usize, usize, NodeSet)> {
    let n = dag.node_count();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let rest = ((1u64 << n) - 1) & !bit(a) & !bit(b);
            let mut z = rest;
            loop {
                if d_separated(dag, a, b, z) {
                    out.push((a, b, z));
                }
                if z == 0 {
                    break;
                }
                z = (z - 1) & rest;
            }
        }
    }
    out.sort_unstable();
    out
}
