//! Score-based structure learning for hybrid Bayesian networks.
//!
//! The crate covers the full path from synthetic data to evaluated posterior
//! samples:
//!
//! * [`graph`]: DAGs, CPDAGs, ordered partitions, SHD.
//! * [`data`] and [`datagen`]: column-typed datasets, the four two-node
//!   scenario generators, the four-node benchmark, equal-quantile
//!   discretization and the all-Gaussian ("RAG") numeric view.
//! * [`scores`]: exact BGe and BDe local scores and the cached score table.
//! * [`sampler`]: partition MCMC and structure MCMC.
//! * [`theory`]: asymptotic expected log posterior ratios under both scores
//!   and their finite-sample Monte Carlo check.
//! * [`metrics`]: TP/FP/FN/TPR/SHD/FR evaluation of posterior samples.
//!
//! Data-parallel loops (score tables, replicates, Monte Carlo) go through
//! [`exec::Execution`]; building without the default `parallel` feature
//! keeps everything on the calling thread.

pub mod data;
pub mod datagen;
pub mod error;
pub mod exec;
pub mod graph;
pub mod metrics;
pub mod numeric;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod scores;
pub mod theory;

pub use error::{Error, Result};
