//! Experiment configuration.
//!
//! A single TOML file with top-level keys and at most one level of tables:
//!
//! ```toml
//! seed = 7
//! out = "results/run1"
//! node_count = 2                 # 2 or 4
//! scenarios = ["cc", "dd"]
//! betas = [0.5, 1.0]             # two-node runs only
//! strategies = ["rag", "disc-2"]
//! replicates = 20
//! n_rows = 200
//! blacklist = "forbidden.csv"    # optional
//! write_samples = true
//!
//! [chain]
//! iterations = 100000
//! burn_in_fraction = 0.2
//! thinning = 1
//!
//! [bge]                          # each key optional
//! alpha_mu = 1.0
//!
//! [bde]
//! ess = 1.0
//! ```
//!
//! Relative paths are taken relative to the working directory.

use crate::error::{CliError, Result};
use crate::strategy::{Hyperparameters, Strategy};
use hbn_core::datagen::Scenario;
use hbn_core::sampler::ChainConfig;
use serde::Deserialize;
use std::path::{Path, PathBuf};

pub const DEFAULT_REPLICATES: usize = 20;
pub const DEFAULT_ROWS: usize = 200;
pub const DEFAULT_ITERATIONS: usize = 100_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub scenarios: Vec<Scenario>,
    pub node_count: usize,
    /// Empty for four-node runs.
    pub betas: Vec<f64>,
    pub strategies: Vec<Strategy>,
    pub replicates: usize,
    pub n_rows: usize,
    /// `seed` is replaced per replicate.
    pub chain: ChainConfig,
    pub hyper: Hyperparameters,
    pub blacklist: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub write_samples: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenarios: Scenario::ALL.to_vec(),
            node_count: 2,
            betas: vec![0.5],
            strategies: vec![Strategy::Rag, Strategy::Disc(2)],
            replicates: DEFAULT_REPLICATES,
            n_rows: DEFAULT_ROWS,
            chain: ChainConfig::new(DEFAULT_ITERATIONS, 0),
            hyper: Hyperparameters::default(),
            blacklist: None,
            out: PathBuf::from("results"),
            seed: DEFAULT_SEED,
            write_samples: true,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    out: Option<PathBuf>,
    node_count: Option<usize>,
    scenarios: Option<Vec<String>>,
    betas: Option<Vec<f64>>,
    strategies: Option<Vec<String>>,
    replicates: Option<usize>,
    n_rows: Option<usize>,
    blacklist: Option<PathBuf>,
    write_samples: Option<bool>,
    #[serde(default)]
    chain: RawChain,
    #[serde(default)]
    bge: RawBge,
    #[serde(default)]
    bde: RawBde,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChain {
    iterations: Option<usize>,
    burn_in_fraction: Option<f64>,
    thinning: Option<usize>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBge {
    alpha_mu: Option<f64>,
    alpha_w: Option<f64>,
    t: Option<f64>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBde {
    ess: Option<f64>,
}

pub fn parse_scenarios<S: AsRef<str>>(items: &[S]) -> Result<Vec<Scenario>> {
    items.iter().map(|s| Ok(s.as_ref().parse::<Scenario>()?)).collect()
}

pub fn parse_strategies<S: AsRef<str>>(items: &[S]) -> Result<Vec<Strategy>> {
    items.iter().map(|s| s.as_ref().parse()).collect()
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let mut cfg = Self::default();
        if let Some(v) = raw.node_count {
            cfg.node_count = v;
        }
        if cfg.node_count == 4 {
            cfg.betas.clear();
        }
        if let Some(v) = raw.scenarios {
            cfg.scenarios = parse_scenarios(&v)?;
        }
        if let Some(v) = raw.betas {
            cfg.betas = v;
        }
        if let Some(v) = raw.strategies {
            cfg.strategies = parse_strategies(&v)?;
        }
        cfg.seed = raw.seed.unwrap_or(cfg.seed);
        cfg.out = raw.out.unwrap_or(cfg.out);
        cfg.replicates = raw.replicates.unwrap_or(cfg.replicates);
        cfg.n_rows = raw.n_rows.unwrap_or(cfg.n_rows);
        cfg.blacklist = raw.blacklist;
        cfg.write_samples = raw.write_samples.unwrap_or(cfg.write_samples);
        cfg.chain.iterations = raw.chain.iterations.unwrap_or(cfg.chain.iterations);
        cfg.chain.burn_in_fraction = raw.chain.burn_in_fraction.unwrap_or(cfg.chain.burn_in_fraction);
        cfg.chain.thinning = raw.chain.thinning.unwrap_or(cfg.chain.thinning);
        cfg.hyper = Hyperparameters {
            alpha_mu: raw.bge.alpha_mu,
            alpha_w: raw.bge.alpha_w,
            t: raw.bge.t,
            ess: raw.bde.ess.unwrap_or(cfg.hyper.ess),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CliError::Config(m.into()));
        if self.scenarios.is_empty() {
            return bad("scenarios must not be empty");
        }
        if self.strategies.is_empty() {
            return bad("strategies must not be empty");
        }
        match self.node_count {
            2 if self.betas.is_empty() => return bad("betas must not be empty for two-node runs"),
            2 => {
                if self.betas.iter().any(|b| !b.is_finite()) {
                    return bad("betas must be finite");
                }
                if self.scenarios.contains(&Scenario::Dd) && self.betas.iter().any(|b| !(0.0..=1.0).contains(b)) {
                    return bad("dd requires every beta in [0, 1]");
                }
            }
            4 if !self.betas.is_empty() => return bad("betas apply to two-node runs only"),
            4 => {}
            _ => return bad("node_count must be 2 or 4"),
        }
        if self.replicates == 0 {
            return bad("replicates must be positive");
        }
        if self.n_rows == 0 {
            return bad("n_rows must be positive");
        }
        self.chain.validate()?;
        self.hyper.validate(self.node_count)?;
        Ok(())
    }

    /// `(β or None, index)` pairs: the β grid for two-node runs, a single
    /// unparameterised cell for four-node runs.
    pub fn beta_cells(&self) -> Vec<Option<f64>> {
        if self.node_count == 4 {
            vec![None]
        } else {
            self.betas.iter().copied().map(Some).collect()
        }
    }
}
