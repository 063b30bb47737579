//! Posterior sampling over DAGs: partition MCMC and structure MCMC.

mod partition;
mod structure;

pub use partition::{
    partition_log_score, partition_mcmc, proposal_prob, propose_partition_move,
    sample_dag_given_partition,
};
pub use structure::{structure_mcmc, structure_neighbourhood_size};

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::rng::{stream_rng, ChainRng};

/// Relative frequencies of the four partition moves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoveWeights {
    pub split: f64,
    pub merge: f64,
    pub relocate: f64,
    pub swap: f64,
}

impl Default for MoveWeights {
    fn default() -> Self {
        Self { split: 0.25, merge: 0.25, relocate: 0.3, swap: 0.2 }
    }
}

impl MoveWeights {
    fn as_array(&self) -> [f64; 4] {
        [self.split, self.merge, self.relocate, self.swap]
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.as_array();
        if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidChainConfig("move weights must be nonnegative".into()));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidChainConfig(format!("move weights sum to {sum}, not 1")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainConfig {
    pub iterations: usize,
    /// Leading fraction of iterations discarded.
    pub burn_in_fraction: f64,
    /// Keep every `thinning`-th post-burn-in iteration.
    pub thinning: usize,
    pub seed: u64,
    pub moves: MoveWeights,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            iterations: 100_000,
            burn_in_fraction: 0.2,
            thinning: 1,
            seed: 0,
            moves: MoveWeights::default(),
        }
    }
}

impl ChainConfig {
    pub fn new(iterations: usize, seed: u64) -> Self {
        Self { iterations, seed, ..Self::default() }
    }

    pub fn burn_in(&self) -> usize {
        (self.iterations as f64 * self.burn_in_fraction).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidChainConfig(m));
        if self.iterations == 0 {
            return bad("iterations must be positive".into());
        }
        if !(0.0..1.0).contains(&self.burn_in_fraction) {
            return bad(format!("burn_in_fraction {} not in [0, 1)", self.burn_in_fraction));
        }
        if self.burn_in() >= self.iterations {
            return bad("burn-in leaves no iterations".into());
        }
        if self.thinning == 0 {
            return bad("thinning must be positive".into());
        }
        self.moves.validate()
    }

    /// The chain's RNG on stream 0 of `seed`.
    pub fn rng(&self) -> ChainRng {
        stream_rng(self.seed, 0)
    }

    /// Number of samples a run stores.
    pub fn kept_count(&self) -> usize {
        (self.iterations - self.burn_in()) / self.thinning
    }

    fn keeps(&self, iteration: usize) -> bool {
        let burn = self.burn_in();
        iteration > burn && (iteration - burn).is_multiple_of(self.thinning)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    /// 1-based chain iteration.
    pub iteration: usize,
    pub dag: Dag,
    pub log_score: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorSamples {
    pub samples: Vec<Sample>,
    pub proposals: usize,
    pub accepted: usize,
}

impl PosteriorSamples {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}
