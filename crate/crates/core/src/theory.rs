//! Large-sample limits of the expected per-row log posterior ratio between
//! the one-edge graph and the empty graph on two nodes: `r10` for BGe on the
//! raw data and `rtilde10` for BDe on median-discretized data. Also a Monte
//! Carlo estimator of the same quantities at finite sample size.

use crate::datagen::{discretize, generate, rag_view, Scenario, ScenarioConfig};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::numeric::{logistic, std_normal_cdf, xlogx, LN_4};
use crate::quadrature::Quadrature;
use crate::rng::derive_seed;
use crate::scores::{BdeHyperparams, BdeScorer, BgeHyperparams, BgeScorer, LocalScore};

/// Smallest sample size accepted by [`finite_sample_ratio_mc`].
pub const MIN_MC_ROWS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitQuery {
    pub scenario: Scenario,
    pub beta: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    /// Success probability of a binary parent.
    pub p: f64,
}

impl LimitQuery {
    /// Unit standard deviations and `p = 1/2`.
    pub fn new(scenario: Scenario, beta: f64) -> Self {
        Self { scenario, beta, sigma1: 1.0, sigma2: 1.0, p: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidQuery(m));
        if !self.beta.is_finite() {
            return bad("beta must be finite".into());
        }
        if !(self.sigma1 > 0.0 && self.sigma1.is_finite() && self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return bad("sigmas must be positive".into());
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return bad(format!("p = {} must lie in (0, 1)", self.p));
        }
        match self.scenario {
            Scenario::Dc if self.p != 0.5 => {
                bad(format!("the dc limits hold for p = 1/2 only, got p = {}", self.p))
            }
            Scenario::Dd if self.beta.abs() > 1.0 => {
                bad(format!("dd needs |beta| <= 1, got {}", self.beta))
            }
            _ => Ok(()),
        }
    }

    fn scenario_config(&self, n_rows: usize, seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            scenario: self.scenario,
            node_count: 2,
            beta: self.beta,
            sigma1: self.sigma1,
            sigma2: self.sigma2,
            p: self.p,
            n_rows,
            seed,
        }
    }
}

/// Probability that both median-discretized variables sit in their upper
/// halves. Not defined for `dd`, whose variables are already binary.
pub fn p11_tilde(q: &LimitQuery, quad: &Quadrature) -> Result<f64> {
    q.validate()?;
    let (b, s1, s2) = (q.beta, q.sigma1, q.sigma2);
    match q.scenario {
        Scenario::Cc => Ok(quad.half_line_normal(|x| std_normal_cdf(s1 * b * x / s2))),
        Scenario::Cd => Ok(quad.half_line_normal(|x| logistic(b * s1 * x))),
        Scenario::Dc => Ok(0.5 * std_normal_cdf(b / (2.0 * s2))),
        Scenario::Dd => Err(Error::InvalidQuery(
            "p11_tilde is undefined for dd; use the exact cell probabilities".into(),
        )),
    }
}

/// BGe limit `r10`; `+inf` for `dd` at `|beta| = 1`.
pub fn r10_limit(q: &LimitQuery, quad: &Quadrature) -> Result<f64> {
    q.validate()?;
    let (b, s1, s2, p) = (q.beta, q.sigma1, q.sigma2, q.p);
    Ok(match q.scenario {
        Scenario::Cc => 0.5 * ((s2 * s2 + b * b * s1 * s1) / (s2 * s2)).ln(),
        Scenario::Cd => {
            let s11 = s1 * s1;
            let s12 = s1 * quad.normal_expectation(|z| z * logistic(b * s1 * z));
            let mean2 = quad.normal_expectation(|z| logistic(b * s1 * z));
            let s22 = mean2 - mean2 * mean2;
            0.5 * (s11 * s22 / (s11 * s22 - s12 * s12)).ln()
        }
        Scenario::Dc => 0.5 * (1.0 + b * b / (4.0 * s2 * s2)).ln(),
        Scenario::Dd => {
            if b.abs() >= 1.0 {
                f64::INFINITY
            } else {
                let skew = (2.0 * p - 1.0) * b;
                0.5 * ((1.0 - skew * skew) / (1.0 - b * b)).ln()
            }
        }
    })
}

/// BDe limit `rtilde10`, the mutual information of the discretized pair.
pub fn rtilde10_limit(q: &LimitQuery, quad: &Quadrature) -> Result<f64> {
    q.validate()?;
    if q.scenario == Scenario::Dd {
        let (b, p) = (q.beta, q.p);
        let cells = [
            (p * (0.5 + b / 2.0), p, 0.5 + (2.0 * p - 1.0) * b / 2.0),
            (p * (0.5 - b / 2.0), p, 0.5 - (2.0 * p - 1.0) * b / 2.0),
            ((1.0 - p) * (0.5 - b / 2.0), 1.0 - p, 0.5 + (2.0 * p - 1.0) * b / 2.0),
            ((1.0 - p) * (0.5 + b / 2.0), 1.0 - p, 0.5 - (2.0 * p - 1.0) * b / 2.0),
        ];
        let mi: f64 = cells
            .iter()
            .filter(|(joint, _, _)| *joint > 0.0)
            .map(|&(joint, m1, m2)| joint * (joint / (m1 * m2)).ln())
            .sum();
        return Ok(mi.max(0.0));
    }
    let pt = p11_tilde(q, quad)?;
    Ok((LN_4 + 2.0 * xlogx(pt) + 2.0 * xlogx(0.5 - pt)).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    /// Standard error of the mean.
    pub std_error: f64,
}

impl MeanSe {
    fn from_values(v: &[f64]) -> Self {
        let k = v.len() as f64;
        let mean = v.iter().sum::<f64>() / k;
        let var = if v.len() > 1 {
            v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)
        } else {
            0.0
        };
        Self { mean, std_error: (var / k).sqrt() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteSampleRatios {
    pub r10: MeanSe,
    pub rtilde10: MeanSe,
}

/// `(1/N) [ln P(X | A -> B) - ln P(X | empty)]` averaged over `replications`
/// datasets: BGe on the raw values for `r10`, BDe on the median split for
/// `rtilde10`. Replicate `i` uses the seed `derive_seed(seed, [i])`.
pub fn finite_sample_ratio_mc(
    q: &LimitQuery,
    n_rows: usize,
    replications: usize,
    seed: u64,
    exec: Execution,
) -> Result<FiniteSampleRatios> {
    q.validate()?;
    if n_rows < MIN_MC_ROWS {
        return Err(Error::InvalidQuery(format!("need at least {MIN_MC_ROWS} rows, got {n_rows}")));
    }
    if replications == 0 {
        return Err(Error::InvalidQuery("need at least one replication".into()));
    }
    let runs = map_indexed(replications, exec, |i| -> Result<(f64, f64)> {
        let cfg = q.scenario_config(n_rows, derive_seed(seed, &[i as u64]));
        let (data, _) = generate(&cfg)?;
        let raw = rag_view(&data);
        let bge = BgeScorer::new(&raw, &BgeHyperparams::defaults(2))?;
        let r = bge.local_score(1, 0b01)? - bge.local_score(1, 0)?;
        let disc = discretize(&data, 2)?;
        let bde = BdeScorer::new(&disc, &BdeHyperparams::default())?;
        let rt = bde.local_score(1, 0b01)? - bde.local_score(1, 0)?;
        Ok((r / n_rows as f64, rt / n_rows as f64))
    });
    let mut r10 = Vec::with_capacity(replications);
    let mut rt10 = Vec::with_capacity(replications);
    for run in runs {
        let (a, b) = run?;
        r10.push(a);
        rt10.push(b);
    }
    Ok(FiniteSampleRatios { r10: MeanSe::from_values(&r10), rtilde10: MeanSe::from_values(&rt10) })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveRow {
    pub beta: f64,
    pub r10: f64,
    pub rtilde10: f64,
}

/// `(beta, r10, rtilde10)` along `betas`, other parameters taken from `base`.
pub fn theory_curves(base: &LimitQuery, betas: &[f64], quad: &Quadrature) -> Result<Vec<CurveRow>> {
    betas
        .iter()
        .map(|&beta| {
            if !beta.is_finite() {
                return Err(Error::InvalidQuery("beta grid must be finite".into()));
            }
            let q = LimitQuery { beta, ..*base };
            Ok(CurveRow { beta, r10: r10_limit(&q, quad)?, rtilde10: rtilde10_limit(&q, quad)? })
        })
        .collect()
}

/// Default plotting grids: `0..=2` in steps of 0.05 for the scenarios with a
/// continuous variable, `0..=0.99` in steps of 0.01 for `dd`.
pub fn default_beta_grid(scenario: Scenario) -> Vec<f64> {
    match scenario {
        Scenario::Dd => (0..=99).map(|i| i as f64 / 100.0).collect(),
        _ => (0..=40).map(|i| i as f64 * 0.05).collect(),
    }
}
