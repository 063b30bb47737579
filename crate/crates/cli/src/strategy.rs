//! Learning strategies: score everything as Gaussian, or discretize
//! continuous columns into equal-quantile levels and score with BDe.

use crate::error::{CliError, Result};
use hbn_core::data::Dataset;
use hbn_core::datagen::{discretize, rag_view};
use hbn_core::scores::{BdeHyperparams, BdeScorer, BgeHyperparams, BgeScorer, ScoreKind, Scorer};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// All columns treated as continuous, BGe score.
    Rag,
    /// Continuous columns cut into `q` equal-quantile levels, BDe score.
    /// Categorical columns are used as they are.
    Disc(usize),
}

impl Strategy {
    pub fn score_kind(&self) -> ScoreKind {
        match self {
            Strategy::Rag => ScoreKind::Bge,
            Strategy::Disc(_) => ScoreKind::Bde,
        }
    }

    /// Stable code mixed into chain seeds.
    pub fn code(&self) -> u64 {
        match self {
            Strategy::Rag => 0,
            Strategy::Disc(q) => *q as u64,
        }
    }

    /// The dataset view the strategy scores.
    pub fn view(&self, data: &Dataset) -> Result<Dataset> {
        Ok(match self {
            Strategy::Rag => rag_view(data),
            Strategy::Disc(q) => discretize(data, *q)?,
        })
    }

    /// Scorer over an already prepared view.
    pub fn scorer(&self, view: &Dataset, hyper: &Hyperparameters) -> Result<Scorer> {
        Ok(match self {
            Strategy::Rag => Scorer::Bge(BgeScorer::new(view, &hyper.bge(view.n_cols()))?),
            Strategy::Disc(_) => Scorer::Bde(BdeScorer::new(view, &hyper.bde())?),
        })
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Rag => f.write_str("rag"),
            Strategy::Disc(q) => write!(f, "disc-{q}"),
        }
    }
}

impl FromStr for Strategy {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "rag" {
            return Ok(Strategy::Rag);
        }
        let q = lower
            .strip_prefix("disc-")
            .and_then(|q| q.parse::<usize>().ok())
            .filter(|&q| q >= 2)
            .ok_or_else(|| {
                CliError::Config(format!("unknown strategy `{s}` (expected rag or disc-<q>, q >= 2)"))
            })?;
        Ok(Strategy::Disc(q))
    }
}

/// Score hyperparameters. Unset BGe values follow the usual defaults for
/// the dataset's column count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyperparameters {
    pub alpha_mu: Option<f64>,
    pub alpha_w: Option<f64>,
    pub t: Option<f64>,
    pub ess: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self { alpha_mu: None, alpha_w: None, t: None, ess: BdeHyperparams::default().ess }
    }
}

impl Hyperparameters {
    pub fn bge(&self, n: usize) -> BgeHyperparams {
        let mut hp = BgeHyperparams::defaults(n);
        let nf = n as f64;
        hp.alpha_mu = self.alpha_mu.unwrap_or(hp.alpha_mu);
        hp.alpha_w = self.alpha_w.unwrap_or(nf + hp.alpha_mu + 1.0);
        hp.t = self.t.unwrap_or(hp.alpha_mu * (hp.alpha_w - nf - 1.0) / (hp.alpha_mu + 1.0));
        hp
    }

    pub fn bde(&self) -> BdeHyperparams {
        BdeHyperparams { ess: self.ess }
    }

    /// Checks the values for an `n`-node network.
    pub fn validate(&self, n: usize) -> Result<()> {
        self.bge(n).validate(n)?;
        self.bde().validate()?;
        Ok(())
    }
}
