//! Batch runner: for every (scenario, β, strategy, replicate) generate data,
//! take the strategy's view, build the score table, run partition MCMC and
//! evaluate against the truth.
//!
//! Seeds: replicate data uses
//! `derive_seed(master, [node_count, scenario, β bits, replicate])`, shared by
//! every strategy; the chain uses `derive_seed(data_seed, [strategy code])`.
//! Both are written into each samples file header.

use crate::blacklist::read_blacklist_names;
use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::io::{resolve_edges, write_metrics, write_samples, MetricsRow, SampleHeader};
use crate::strategy::Strategy;
use hbn_core::datagen::{generate, Scenario, ScenarioConfig};
use hbn_core::exec::{map_indexed, Execution};
use hbn_core::graph::Blacklist;
use hbn_core::metrics::{aggregate, evaluate_replicate, ReplicateEval};
use hbn_core::rng::derive_seed;
use hbn_core::sampler::{partition_mcmc, ChainConfig};
use hbn_core::scores::{build_score_table, TableOptions};
use std::path::{Path, PathBuf};

/// One work item of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Task {
    pub scenario: Scenario,
    pub beta: Option<f64>,
    pub strategy: Strategy,
    pub replicate: usize,
}

fn scenario_index(s: Scenario) -> u64 {
    Scenario::ALL.iter().position(|&t| t == s).expect("known scenario") as u64
}

pub fn data_seed(master: u64, node_count: usize, scenario: Scenario, beta: Option<f64>, replicate: usize) -> u64 {
    let beta_bits = beta.map_or(0, f64::to_bits);
    derive_seed(master, &[node_count as u64, scenario_index(scenario), beta_bits, replicate as u64])
}

pub fn chain_seed(data_seed: u64, strategy: Strategy) -> u64 {
    derive_seed(data_seed, &[strategy.code()])
}

pub fn scenario_config(cfg: &ExperimentConfig, task: &Task) -> ScenarioConfig {
    let seed = data_seed(cfg.seed, cfg.node_count, task.scenario, task.beta, task.replicate);
    match task.beta {
        Some(beta) => ScenarioConfig::two_node(task.scenario, beta, cfg.n_rows, seed),
        None => ScenarioConfig::four_node(task.scenario, cfg.n_rows, seed),
    }
}

pub fn sample_file_name(task: &Task, node_count: usize) -> String {
    let beta = task.beta.map(|b| format!("_b{b}")).unwrap_or_default();
    format!("{}_n{node_count}{beta}_{}_r{:03}.jsonl", task.scenario, task.strategy, task.replicate)
}

/// Runs one replicate and optionally writes its samples file.
pub fn run_task(
    cfg: &ExperimentConfig,
    task: &Task,
    forbidden: &[(String, String)],
    samples_dir: Option<&Path>,
) -> Result<ReplicateEval> {
    let sc = scenario_config(cfg, task);
    let (data, truth) = generate(&sc)?;
    let names = data.names();
    let blacklist = Blacklist::new(names.len(), resolve_edges(forbidden, &names)?)?;
    let view = task.strategy.view(&data)?;
    let scorer = task.strategy.scorer(&view, &cfg.hyper)?;
    let opts = TableOptions { exec: Execution::Sequential, ..TableOptions::default() };
    let table = build_score_table(&scorer, &blacklist, &opts)?;
    let chain = ChainConfig { seed: chain_seed(sc.seed, task.strategy), ..cfg.chain };
    let run = partition_mcmc(&table, &chain, &mut chain.rng())?;
    if let Some(dir) = samples_dir {
        let mut header = SampleHeader::new(names, "partition", &chain);
        header.data_seed = Some(sc.seed);
        header.strategy = Some(task.strategy.to_string());
        write_samples(&dir.join(sample_file_name(task, cfg.node_count)), &header, &run)?;
    }
    Ok(evaluate_replicate(&run.samples, &truth)?)
}

/// Cells in output order: scenario, then β, then strategy.
pub fn cells(cfg: &ExperimentConfig) -> Vec<(Scenario, Option<f64>, Strategy)> {
    let mut out = Vec::new();
    for &s in &cfg.scenarios {
        for b in cfg.beta_cells() {
            for &st in &cfg.strategies {
                out.push((s, b, st));
            }
        }
    }
    out
}

/// Evaluates every cell, writing samples files under `<out>/samples` when
/// enabled. A failing replicate turns its cell into an error row.
pub fn run_cells(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<MetricsRow>> {
    cfg.validate()?;
    let forbidden = match &cfg.blacklist {
        Some(p) => read_blacklist_names(p)?,
        None => Vec::new(),
    };
    let samples_dir: Option<PathBuf> = cfg.write_samples.then(|| cfg.out.join("samples"));
    if let Some(dir) = &samples_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let cells = cells(cfg);
    let tasks: Vec<Task> = cells
        .iter()
        .flat_map(|&(scenario, beta, strategy)| {
            (0..cfg.replicates).map(move |replicate| Task { scenario, beta, strategy, replicate })
        })
        .collect();
    let results = map_indexed(tasks.len(), exec, |i| {
        run_task(cfg, &tasks[i], &forbidden, samples_dir.as_deref()).map_err(|e| e.to_string())
    });
    let rows = cells
        .iter()
        .zip(results.chunks(cfg.replicates))
        .map(|(&(scenario, beta, strategy), chunk)| {
            let outcome = chunk
                .iter()
                .cloned()
                .collect::<std::result::Result<Vec<_>, String>>()
                .and_then(|evals| aggregate(&evals).map_err(|e| e.to_string()));
            MetricsRow {
                scenario: scenario.to_string(),
                beta,
                strategy: strategy.to_string(),
                score: strategy.score_kind().to_string(),
                outcome,
            }
        })
        .collect();
    Ok(rows)
}

/// `# key=value` header lines describing a run.
pub fn run_comments(cfg: &ExperimentConfig) -> Vec<(String, String)> {
    let mut c = vec![
        ("seed".to_owned(), cfg.seed.to_string()),
        ("node_count".to_owned(), cfg.node_count.to_string()),
        ("replicates".to_owned(), cfg.replicates.to_string()),
        ("n_rows".to_owned(), cfg.n_rows.to_string()),
        ("iterations".to_owned(), cfg.chain.iterations.to_string()),
        ("burn_in_fraction".to_owned(), cfg.chain.burn_in_fraction.to_string()),
        ("thinning".to_owned(), cfg.chain.thinning.to_string()),
        ("ess".to_owned(), cfg.hyper.ess.to_string()),
    ];
    if let Some(b) = &cfg.blacklist {
        c.push(("blacklist".to_owned(), b.display().to_string()));
    }
    c
}

/// Runs the experiment and writes `<out>/metrics.csv`; returns its rows.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<MetricsRow>> {
    let rows = run_cells(cfg, exec)?;
    write_metrics(&cfg.out.join("metrics.csv"), &rows, &run_comments(cfg))?;
    Ok(rows)
}
