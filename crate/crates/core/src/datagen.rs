//! Synthetic data for the two-node scenarios and the four-node benchmark,
//! plus the two views the learning strategies score: equal-quantile
//! discretization and the all-continuous view.

use crate::data::{Column, Dataset};
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::numeric::logistic;
use crate::rng::stream_rng;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use std::fmt;
use std::str::FromStr;

/// Parent mean of the continuous parent in the two-node scenarios.
pub const TWO_NODE_PARENT_MEAN: f64 = -1.0;

const FOUR_NODE_MEAN_A: f64 = -3.0;
const FOUR_NODE_MEAN_C: f64 = 6.0;

/// Labels of the four-level parent C in `dc` and `dd`.
const FOUR_LABELS: [f64; 4] = [1.0, 2.0, 3.0, 4.0];

/// Conditional success probabilities of B and D for the discrete four-node
/// benchmark, indexed `[a - 1][c - 1]`.
const DD_PROB_B: [[f64; 4]; 2] = [[0.05, 0.10, 0.30, 0.70], [0.10, 0.30, 0.70, 0.95]];
const DD_PROB_D: [[f64; 4]; 2] = [[0.95, 0.90, 0.70, 0.30], [0.90, 0.70, 0.30, 0.05]];

/// Which of parent/child are continuous (`c`) or discrete (`d`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    Cc,
    Cd,
    Dc,
    Dd,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::Cc, Scenario::Cd, Scenario::Dc, Scenario::Dd];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Cc => "cc",
            Scenario::Cd => "cd",
            Scenario::Dc => "dc",
            Scenario::Dd => "dd",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().trim_start_matches("s_") {
            "cc" => Ok(Scenario::Cc),
            "cd" => Ok(Scenario::Cd),
            "dc" => Ok(Scenario::Dc),
            "dd" => Ok(Scenario::Dd),
            other => Err(Error::InvalidScenario(format!("unknown scenario `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// 2 or 4.
    pub node_count: usize,
    /// Dependence strength (two-node scenarios only).
    pub beta: f64,
    /// Standard deviation of the continuous parent.
    pub sigma1: f64,
    /// Noise standard deviation of the continuous child.
    pub sigma2: f64,
    /// Success probability of the binary parent.
    pub p: f64,
    pub n_rows: usize,
    pub seed: u64,
}

impl ScenarioConfig {
    /// Two-node settings of the simulation study: σ₁ = σ₂ = 1, p = 0.5 for
    /// `dc` and p = 0.1 for `dd`.
    pub fn two_node(scenario: Scenario, beta: f64, n_rows: usize, seed: u64) -> Self {
        let p = if scenario == Scenario::Dd { 0.1 } else { 0.5 };
        Self { scenario, node_count: 2, beta, sigma1: 1.0, sigma2: 1.0, p, n_rows, seed }
    }

    pub fn four_node(scenario: Scenario, n_rows: usize, seed: u64) -> Self {
        Self { scenario, node_count: 4, beta: 0.0, sigma1: 1.0, sigma2: 1.0, p: 0.5, n_rows, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScenario(m));
        if self.n_rows == 0 {
            return bad("n_rows must be positive".into());
        }
        if !(self.sigma1 > 0.0 && self.sigma1.is_finite() && self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return bad(format!("sigmas must be positive, got {} and {}", self.sigma1, self.sigma2));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("p = {} is not a probability", self.p));
        }
        if !self.beta.is_finite() {
            return bad("beta must be finite".into());
        }
        match self.node_count {
            2 => {
                if self.scenario == Scenario::Dd && !(0.0..=1.0).contains(&self.beta) {
                    return bad(format!("dd requires beta in [0, 1], got {}", self.beta));
                }
            }
            4 => {}
            n => return bad(format!("node_count must be 2 or 4, got {n}")),
        }
        Ok(())
    }
}

/// Generates data and truth for `cfg` with the RNG seeded from `cfg.seed`.
pub fn generate(cfg: &ScenarioConfig) -> Result<(Dataset, Dag)> {
    let mut rng = stream_rng(cfg.seed, 0);
    match cfg.node_count {
        4 => gen_4node(cfg, &mut rng),
        _ => gen_2node(cfg, &mut rng),
    }
}

fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> u32 {
    u32::from(rng.random::<f64>() < p)
}

fn normal(mean: f64, sd: f64) -> Normal<f64> {
    Normal::new(mean, sd).expect("validated standard deviation")
}

/// Two nodes A → B under one of the four scenario laws.
pub fn gen_2node<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Result<(Dataset, Dag)> {
    cfg.validate()?;
    if cfg.node_count != 2 {
        return Err(Error::InvalidScenario("gen_2node needs node_count = 2".into()));
    }
    let n = cfg.n_rows;
    let beta = cfg.beta;
    let noise = normal(0.0, cfg.sigma2);
    let parent = normal(TWO_NODE_PARENT_MEAN, cfg.sigma1);
    let (a, b) = match cfg.scenario {
        Scenario::Cc => {
            let mut a = Vec::with_capacity(n);
            let mut b = Vec::with_capacity(n);
            for _ in 0..n {
                let x = parent.sample(rng);
                a.push(x);
                b.push(beta * x + noise.sample(rng));
            }
            (Column::continuous("A", a), Column::continuous("B", b))
        }
        Scenario::Cd => {
            let mut a = Vec::with_capacity(n);
            let mut b = Vec::with_capacity(n);
            for _ in 0..n {
                let x = parent.sample(rng);
                a.push(x);
                b.push(bernoulli(rng, logistic(beta * (x - TWO_NODE_PARENT_MEAN))));
            }
            (Column::continuous("A", a), Column::categorical("B", 2, b))
        }
        Scenario::Dc => {
            let mut a = Vec::with_capacity(n);
            let mut b = Vec::with_capacity(n);
            for _ in 0..n {
                let x = bernoulli(rng, cfg.p);
                a.push(x);
                b.push(beta * f64::from(x) + noise.sample(rng));
            }
            (Column::categorical("A", 2, a), Column::continuous("B", b))
        }
        Scenario::Dd => {
            let mut a = Vec::with_capacity(n);
            let mut b = Vec::with_capacity(n);
            for _ in 0..n {
                let x = bernoulli(rng, cfg.p);
                let pb = if x == 1 { 0.5 + beta / 2.0 } else { 0.5 - beta / 2.0 };
                a.push(x);
                b.push(bernoulli(rng, pb));
            }
            (Column::categorical("A", 2, a), Column::categorical("B", 2, b))
        }
    };
    Ok((Dataset::new(vec![a, b])?, Dag::new(2, [(0, 1)])?))
}

/// The four-node benchmark A → B ← C, A → D ← C (columns A, B, C, D).
/// Discrete parents are stored as 0-based codes. Labelled parents (A in `dc`
/// with labels 1, 2; C in `dc` and `dd` with labels 1..4) keep their labels
/// as level values, which enter the generative formulas and the RAG view.
/// Bernoulli columns are 0/1.
pub fn gen_4node<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Result<(Dataset, Dag)> {
    cfg.validate()?;
    if cfg.node_count != 4 {
        return Err(Error::InvalidScenario("gen_4node needs node_count = 4".into()));
    }
    let n = cfg.n_rows;
    let na = normal(FOUR_NODE_MEAN_A, 1.0);
    let nc = normal(FOUR_NODE_MEAN_C, 1.0);
    let eps = normal(0.0, 1.0);
    let columns = match cfg.scenario {
        Scenario::Cc | Scenario::Cd => {
            let mut a = Vec::with_capacity(n);
            let mut c = Vec::with_capacity(n);
            let mut bc = Vec::with_capacity(n);
            let mut dc = Vec::with_capacity(n);
            let mut bd = Vec::with_capacity(n);
            let mut dd = Vec::with_capacity(n);
            for _ in 0..n {
                let x = na.sample(rng);
                let z = nc.sample(rng);
                a.push(x);
                c.push(z);
                if cfg.scenario == Scenario::Cc {
                    bc.push(1.5 * x + 3.0 * z + eps.sample(rng));
                    dc.push(2.0 * x + 1.5 * z + eps.sample(rng));
                } else {
                    let s = x + z - FOUR_NODE_MEAN_A - FOUR_NODE_MEAN_C;
                    bd.push(bernoulli(rng, logistic(2.0 * s)));
                    dd.push(bernoulli(rng, logistic(-1.5 * s)));
                }
            }
            if cfg.scenario == Scenario::Cc {
                vec![
                    Column::continuous("A", a),
                    Column::continuous("B", bc),
                    Column::continuous("C", c),
                    Column::continuous("D", dc),
                ]
            } else {
                vec![
                    Column::continuous("A", a),
                    Column::categorical("B", 2, bd),
                    Column::continuous("C", c),
                    Column::categorical("D", 2, dd),
                ]
            }
        }
        Scenario::Dc | Scenario::Dd => {
            let mut a = Vec::with_capacity(n);
            let mut c = Vec::with_capacity(n);
            let mut bc = Vec::with_capacity(n);
            let mut dc = Vec::with_capacity(n);
            let mut bd = Vec::with_capacity(n);
            let mut dd = Vec::with_capacity(n);
            for _ in 0..n {
                let la = rng.random_range(1..=2u32);
                let lc = rng.random_range(1..=4u32);
                a.push(la - 1);
                c.push(lc - 1);
                if cfg.scenario == Scenario::Dc {
                    let (x, z) = (f64::from(la), f64::from(lc));
                    bc.push(1.5 * x + 3.0 * z + eps.sample(rng));
                    dc.push(2.0 * x + 1.5 * z + eps.sample(rng));
                } else {
                    let (i, j) = ((la - 1) as usize, (lc - 1) as usize);
                    bd.push(bernoulli(rng, DD_PROB_B[i][j]));
                    dd.push(bernoulli(rng, DD_PROB_D[i][j]));
                }
            }
            if cfg.scenario == Scenario::Dc {
                vec![
                    Column::categorical("A", 2, a).with_level_values(vec![1.0, 2.0]),
                    Column::continuous("B", bc),
                    Column::categorical("C", 4, c).with_level_values(FOUR_LABELS.to_vec()),
                    Column::continuous("D", dc),
                ]
            } else {
                vec![
                    Column::categorical("A", 2, a),
                    Column::categorical("B", 2, bd),
                    Column::categorical("C", 4, c).with_level_values(FOUR_LABELS.to_vec()),
                    Column::categorical("D", 2, dd),
                ]
            }
        }
    };
    let truth = Dag::new(4, [(0, 1), (2, 1), (0, 3), (2, 3)])?;
    Ok((Dataset::new(columns)?, truth))
}

/// Type-7 sample quantile of sorted data.
fn quantile_sorted(sorted: &[f64], prob: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * prob;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Replaces each continuous column by `q` equal-quantile levels (values at a
/// cut go to the lower level). Categorical columns pass through unchanged.
pub fn discretize(data: &Dataset, q: usize) -> Result<Dataset> {
    if q < 2 {
        return Err(Error::InvalidDataset(format!("discretization needs q >= 2, got {q}")));
    }
    let mut columns = Vec::with_capacity(data.n_cols());
    for col in data.columns() {
        if !col.kind.is_continuous() {
            columns.push(col.clone());
            continue;
        }
        let mut sorted = col.values.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.is_empty() || sorted[0] == sorted[sorted.len() - 1] {
            return Err(Error::ConstantColumn(col.name.clone()));
        }
        let cuts: Vec<f64> = (1..q).map(|i| quantile_sorted(&sorted, i as f64 / q as f64)).collect();
        let codes = col
            .values
            .iter()
            .map(|&v| cuts.iter().filter(|&&c| c < v).count() as u32)
            .collect();
        columns.push(Column::categorical(col.name.clone(), q, codes));
    }
    Dataset::new(columns)
}

/// All columns re-kinded continuous. Categorical columns contribute their
/// level values when they declare them, their codes as-is otherwise.
pub fn rag_view(data: &Dataset) -> Dataset {
    let columns = data
        .columns()
        .iter()
        .map(|c| Column::continuous(c.name.clone(), c.numeric_values()))
        .collect();
    Dataset::new(columns).expect("re-kinding keeps a valid dataset valid")
}
