//! Desk-scale reproductions of the two-node table, the four-node table and
//! the limit curves.

use crate::config::{ExperimentConfig, DEFAULT_ITERATIONS, DEFAULT_REPLICATES, DEFAULT_ROWS, DEFAULT_SEED};
use crate::error::{CliError, Result};
use crate::experiment::{run_cells, run_comments};
use crate::io::{write_curve, write_metrics, MetricsRow};
use crate::strategy::Strategy;
use hbn_core::datagen::Scenario;
use hbn_core::exec::Execution;
use hbn_core::quadrature::Quadrature;
use hbn_core::theory::{default_beta_grid, theory_curves, LimitQuery};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Table2,
    Table3,
    Fig3,
}

impl FromStr for Target {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table2" => Ok(Target::Table2),
            "table3" => Ok(Target::Table3),
            "fig3" => Ok(Target::Fig3),
            _ => Err(CliError::Config(format!("unknown target `{s}` (table2, table3, fig3)"))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Table2 => "table2",
            Target::Table3 => "table3",
            Target::Fig3 => "fig3",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReproduceOptions {
    pub replicates: usize,
    pub n_rows: usize,
    pub iterations: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub write_samples: bool,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self {
            replicates: DEFAULT_REPLICATES,
            n_rows: DEFAULT_ROWS,
            iterations: DEFAULT_ITERATIONS,
            seed: DEFAULT_SEED,
            out: PathBuf::from("results"),
            write_samples: false,
        }
    }
}

/// β columns of the two-node table.
pub fn table2_betas(s: Scenario) -> Vec<f64> {
    match s {
        Scenario::Dd => vec![0.1, 0.25, 0.4, 0.6, 0.75, 0.9],
        _ => vec![0.05, 0.1, 0.5, 1.0, 1.5, 2.0],
    }
}

/// Strategy rows of the four-node table. Every `dd` column is already
/// categorical, so a single BDe row covers all discretization levels.
pub fn table3_strategies(s: Scenario) -> Vec<Strategy> {
    match s {
        Scenario::Dd => vec![Strategy::Rag, Strategy::Disc(2)],
        _ => vec![Strategy::Rag, Strategy::Disc(2), Strategy::Disc(4)],
    }
}

fn base_config(opts: &ReproduceOptions, scenario: Scenario) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        scenarios: vec![scenario],
        replicates: opts.replicates,
        n_rows: opts.n_rows,
        out: opts.out.clone(),
        seed: opts.seed,
        write_samples: opts.write_samples,
        ..ExperimentConfig::default()
    };
    cfg.chain.iterations = opts.iterations;
    cfg
}

pub fn table2_config(opts: &ReproduceOptions, scenario: Scenario) -> ExperimentConfig {
    ExperimentConfig {
        node_count: 2,
        betas: table2_betas(scenario),
        strategies: vec![Strategy::Rag, Strategy::Disc(2)],
        ..base_config(opts, scenario)
    }
}

pub fn table3_config(opts: &ReproduceOptions, scenario: Scenario) -> ExperimentConfig {
    ExperimentConfig {
        node_count: 4,
        betas: Vec::new(),
        strategies: table3_strategies(scenario),
        ..base_config(opts, scenario)
    }
}

fn table_rows(
    opts: &ReproduceOptions,
    exec: Execution,
    make: fn(&ReproduceOptions, Scenario) -> ExperimentConfig,
) -> Result<Vec<MetricsRow>> {
    let mut rows = Vec::new();
    for s in Scenario::ALL {
        rows.extend(run_cells(&make(opts, s), exec)?);
    }
    Ok(rows)
}

/// 4 scenarios × 6 β × {rag, disc-2}.
pub fn table2_rows(opts: &ReproduceOptions, exec: Execution) -> Result<Vec<MetricsRow>> {
    table_rows(opts, exec, table2_config)
}

/// 4 scenario blocks × strategy rows.
pub fn table3_rows(opts: &ReproduceOptions, exec: Execution) -> Result<Vec<MetricsRow>> {
    table_rows(opts, exec, table3_config)
}

/// Limit curves, one per scenario: σ₁ = σ₂ = 1 and p = ½.
pub fn fig3_curves(out: &Path) -> Result<Vec<PathBuf>> {
    let quad = Quadrature::default();
    let mut paths = Vec::new();
    for s in Scenario::ALL {
        let base = LimitQuery::new(s, 0.0);
        let rows = theory_curves(&base, &default_beta_grid(s), &quad)?;
        let path = out.join(format!("fig3_{s}.csv"));
        let comments = [
            ("scenario".to_owned(), s.to_string()),
            ("sigma1".to_owned(), base.sigma1.to_string()),
            ("sigma2".to_owned(), base.sigma2.to_string()),
            ("p".to_owned(), base.p.to_string()),
        ];
        write_curve(&path, &rows, &comments)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Runs `target` and writes its CSV files under `opts.out`.
pub fn reproduce(target: Target, opts: &ReproduceOptions, exec: Execution) -> Result<Vec<PathBuf>> {
    let rows = match target {
        Target::Fig3 => return fig3_curves(&opts.out),
        Target::Table2 => table2_rows(opts, exec)?,
        Target::Table3 => table3_rows(opts, exec)?,
    };
    let cfg = match target {
        Target::Table2 => table2_config(opts, Scenario::Cc),
        _ => table3_config(opts, Scenario::Cc),
    };
    let mut comments = run_comments(&cfg);
    comments.insert(0, ("table".to_owned(), target.to_string()));
    let path = opts.out.join(format!("{target}.csv"));
    write_metrics(&path, &rows, &comments)?;
    Ok(vec![path])
}
