//! Evaluation of posterior samples against a known truth: skeleton
//! confusion counts, SHD of the modal DAG, and the pooled frequency ratio of
//! the truth's equivalence class to the empty graph.

use crate::error::{Error, Result};
use crate::graph::{cpdag, shd, Dag};
use crate::sampler::Sample;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    /// `tp / (tp + fn)`; 1 when the truth has no edges.
    pub tpr: f64,
}

/// Skeleton-level true/false positives and false negatives.
pub fn confusion(estimate: &Dag, truth: &Dag) -> Result<Confusion> {
    if estimate.node_count() != truth.node_count() {
        return Err(Error::NodeCountMismatch(estimate.node_count(), truth.node_count()));
    }
    let se = estimate.skeleton();
    let st = truth.skeleton();
    let tp = se.intersection(&st).count();
    let fp = se.len() - tp;
    let fn_ = st.len() - tp;
    let tpr = if tp + fn_ > 0 { tp as f64 / (tp + fn_) as f64 } else { 1.0 };
    Ok(Confusion { tp, fp, fn_, tpr })
}

/// Distinct DAGs with visit counts and stored log scores.
fn tally(samples: &[Sample]) -> HashMap<&Dag, (usize, f64)> {
    let mut counts: HashMap<&Dag, (usize, f64)> = HashMap::new();
    for s in samples {
        let e = counts.entry(&s.dag).or_insert((0, s.log_score));
        e.0 += 1;
    }
    counts
}

/// Most visited DAG; ties go to the higher log score, then to the
/// lexicographically smaller edge list.
pub fn map_dag(samples: &[Sample]) -> Result<Dag> {
    let counts = tally(samples);
    counts
        .into_iter()
        .max_by(|(da, (ca, sa)), (db, (cb, sb))| {
            ca.cmp(cb)
                .then(sa.total_cmp(sb))
                .then_with(|| db.edges().cmp(&da.edges()))
        })
        .map(|(d, _)| d.clone())
        .ok_or(Error::EmptySamples)
}

/// Samples in the equivalence class of `dependent` and samples equal to the
/// empty graph.
pub fn class_counts(samples: &[Sample], dependent: &Dag) -> (u64, u64) {
    let target = cpdag(dependent);
    let mut c1 = 0;
    let mut c0 = 0;
    for (dag, (count, _)) in tally(samples) {
        if dag.edge_count() == 0 {
            c0 += count as u64;
        }
        if cpdag(dag) == target {
            c1 += count as u64;
        }
    }
    (c1, c0)
}

/// `Σ c1 / Σ c0` over replicates; `+inf` when only the dependent class was
/// visited.
pub fn frequency_ratio(counts: &[(u64, u64)]) -> Result<f64> {
    let c1: u64 = counts.iter().map(|c| c.0).sum();
    let c0: u64 = counts.iter().map(|c| c.1).sum();
    match (c1, c0) {
        (0, 0) => Err(Error::UndefinedFrequencyRatio),
        (_, 0) => Ok(f64::INFINITY),
        _ => Ok(c1 as f64 / c0 as f64),
    }
}

/// Metrics of one replicate.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateEval {
    pub estimate: Dag,
    pub confusion: Confusion,
    pub shd: usize,
    pub c1: u64,
    pub c0: u64,
}

pub fn evaluate_replicate(samples: &[Sample], truth: &Dag) -> Result<ReplicateEval> {
    let estimate = map_dag(samples)?;
    let confusion = confusion(&estimate, truth)?;
    let shd = shd(&estimate, truth)?;
    let (c1, c0) = class_counts(samples, truth);
    Ok(ReplicateEval { estimate, confusion, shd, c1, c0 })
}

/// Replicate-averaged metrics. `fr` is `None` when neither graph was
/// visited in any replicate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalReport {
    pub replicates: usize,
    pub tp: f64,
    pub fp: f64,
    pub fn_: f64,
    pub tpr: f64,
    pub shd: f64,
    pub fr: Option<f64>,
}

/// Averages per-replicate metrics and pools the frequency-ratio counts.
/// The result does not depend on replicate order.
pub fn aggregate(evals: &[ReplicateEval]) -> Result<EvalReport> {
    if evals.is_empty() {
        return Err(Error::EmptySamples);
    }
    let k = evals.len() as f64;
    let sum = |f: &dyn Fn(&ReplicateEval) -> usize| evals.iter().map(f).sum::<usize>() as f64;
    let mut tprs: Vec<f64> = evals.iter().map(|e| e.confusion.tpr).collect();
    tprs.sort_by(f64::total_cmp);
    let counts: Vec<(u64, u64)> = evals.iter().map(|e| (e.c1, e.c0)).collect();
    let fr = match frequency_ratio(&counts) {
        Ok(v) => Some(v),
        Err(Error::UndefinedFrequencyRatio) => None,
        Err(e) => return Err(e),
    };
    Ok(EvalReport {
        replicates: evals.len(),
        tp: sum(&|e| e.confusion.tp) / k,
        fp: sum(&|e| e.confusion.fp) / k,
        fn_: sum(&|e| e.confusion.fn_) / k,
        tpr: tprs.iter().sum::<f64>() / k,
        shd: sum(&|e| e.shd) / k,
        fr,
    })
}

/// [`evaluate_replicate`] on each `(samples, truth)` pair, then [`aggregate`].
pub fn evaluate_replicates(runs: &[(&[Sample], &Dag)]) -> Result<EvalReport> {
    let evals = runs
        .iter()
        .map(|(s, t)| evaluate_replicate(s, t))
        .collect::<Result<Vec<_>>>()?;
    aggregate(&evals)
}
