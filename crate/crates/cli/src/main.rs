use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hbn_cli::blacklist::load_blacklist;
use hbn_cli::config::{
    parse_scenarios, parse_strategies, ExperimentConfig, DEFAULT_ITERATIONS, DEFAULT_REPLICATES, DEFAULT_ROWS,
    DEFAULT_SEED,
};
use hbn_cli::experiment::run_experiment;
use hbn_cli::io::{
    fmt_f64, read_dag, read_dataset, read_samples, schema_path_for, write_dag, write_dataset, write_metrics,
    write_samples, MetricsRow, SampleHeader, METRICS_HEADER,
};
use hbn_cli::reproduce::{reproduce, ReproduceOptions, Target};
use hbn_cli::strategy::{Hyperparameters, Strategy};
use hbn_core::datagen::{generate, Scenario, ScenarioConfig};
use hbn_core::exec::Execution;
use hbn_core::graph::Blacklist;
use hbn_core::metrics::{aggregate, evaluate_replicate, map_dag};
use hbn_core::quadrature::Quadrature;
use hbn_core::sampler::{partition_mcmc, structure_mcmc, ChainConfig};
use hbn_core::scores::{build_score_table, TableOptions};
use hbn_core::theory::{default_beta_grid, finite_sample_ratio_mc, r10_limit, rtilde10_limit, theory_curves, LimitQuery};
use std::path::{Path, PathBuf};

/// Structure learning for hybrid Bayesian networks: simulate data, sample
/// DAG posteriors, evaluate them and reproduce the simulation tables.
#[derive(Parser)]
#[command(name = "hbn", version)]
struct Cli {
    /// Worker threads for replicate-level parallelism (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one scenario dataset with its true DAG.
    Simulate(SimulateArgs),
    /// Sample the DAG posterior of a dataset.
    Learn(LearnArgs),
    /// Score samples files against a true DAG.
    Evaluate(EvaluateArgs),
    /// Limits of the expected log posterior ratios.
    Theory(TheoryArgs),
    /// Reproduce a table or the limit curves at desk scale.
    Reproduce(ReproduceArgs),
    /// Run the experiment described by a config file.
    Run(RunArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: Scenario,
    /// Dependence strength (two-node networks).
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// 2 or 4.
    #[arg(long, default_value_t = 2)]
    nodes: usize,
    #[arg(long, default_value_t = DEFAULT_ROWS)]
    rows: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output directory for data.csv, data.schema.json and truth.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerKind {
    Partition,
    Structure,
}

#[derive(Args)]
struct LearnArgs {
    #[arg(long)]
    data: PathBuf,
    /// Defaults to the data file's `.schema.json` sidecar.
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long, default_value = "rag")]
    strategy: Strategy,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iterations: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// CSV `from,to` of forbidden edges.
    #[arg(long)]
    blacklist: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "partition")]
    sampler: SamplerKind,
    #[arg(long)]
    max_parents: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    ess: f64,
    /// Samples file (JSON lines).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// One samples file per replicate.
    #[arg(long, required = true, num_args = 1..)]
    samples: Vec<PathBuf>,
    /// True DAG edge list.
    #[arg(long)]
    truth: PathBuf,
    /// Scenario label for the metrics row.
    #[arg(long, default_value = "")]
    scenario: String,
    /// Metrics CSV; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TheoryArgs {
    /// Scenarios (default: all).
    #[arg(long, value_delimiter = ',')]
    scenario: Vec<Scenario>,
    /// Evaluate at these β values instead of writing full curves.
    #[arg(long, value_delimiter = ',')]
    beta: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    sigma1: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Also estimate the finite-sample ratios with this many rows.
    #[arg(long)]
    mc_rows: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    replicates: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Directory for curve files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ReproduceArgs {
    /// table2, table3 or fig3.
    target: Target,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    replicates: usize,
    #[arg(long, default_value_t = DEFAULT_ROWS)]
    rows: usize,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iterations: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Also write one samples file per replicate.
    #[arg(long)]
    write_samples: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    strategy: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    scenario: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    beta: Vec<f64>,
    #[arg(long)]
    blacklist: Option<PathBuf>,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    #[cfg(feature = "parallel")]
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Learn(a) => learn(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Theory(a) => theory(a, exec),
        Command::Reproduce(a) => {
            let opts = ReproduceOptions {
                replicates: a.replicates,
                n_rows: a.rows,
                iterations: a.iterations,
                seed: a.seed,
                out: a.out,
                write_samples: a.write_samples,
            };
            for path in reproduce(a.target, &opts, exec)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Run(a) => run(a, exec),
    }
}

fn kv(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| ((*k).to_owned(), v.clone())).collect()
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let cfg = match a.nodes {
        2 => ScenarioConfig::two_node(a.scenario, a.beta, a.rows, a.seed),
        4 => ScenarioConfig::four_node(a.scenario, a.rows, a.seed),
        n => bail!("--nodes must be 2 or 4, got {n}"),
    };
    let (data, truth) = generate(&cfg)?;
    let mut comments = vec![
        ("seed", a.seed.to_string()),
        ("scenario", a.scenario.to_string()),
        ("nodes", a.nodes.to_string()),
    ];
    if a.nodes == 2 {
        comments.push(("beta", a.beta.to_string()));
    }
    let comments = kv(&comments);
    let data_path = a.out.join("data.csv");
    write_dataset(&data_path, &data, &comments)?;
    write_dag(&a.out.join("truth.csv"), &truth, &data.names(), &comments)?;
    println!("{}", data_path.display());
    Ok(())
}

fn learn(a: LearnArgs) -> Result<()> {
    let schema = a.schema.clone().unwrap_or_else(|| schema_path_for(&a.data));
    let data = read_dataset(&a.data, &schema)?;
    let names = data.names();
    let blacklist = match &a.blacklist {
        Some(p) => Blacklist::new(names.len(), load_blacklist(p, &names)?)?,
        None => Blacklist::none(names.len()),
    };
    let hyper = Hyperparameters { ess: a.ess, ..Hyperparameters::default() };
    let view = a.strategy.view(&data)?;
    let scorer = a.strategy.scorer(&view, &hyper)?;
    let opts = TableOptions { max_parents: a.max_parents, ..TableOptions::default() };
    let table = build_score_table(&scorer, &blacklist, &opts)?;
    let chain = ChainConfig::new(a.iterations, a.seed);
    let (run, sampler) = match a.sampler {
        SamplerKind::Partition => (partition_mcmc(&table, &chain, &mut chain.rng())?, "partition"),
        SamplerKind::Structure => (structure_mcmc(&table, &chain, &mut chain.rng())?, "structure"),
    };
    let mut header = SampleHeader::new(names.clone(), sampler, &chain);
    header.strategy = Some(a.strategy.to_string());
    write_samples(&a.out, &header, &run)?;
    let map = map_dag(&run.samples)?;
    let edges: Vec<String> = map.edges().iter().map(|&(x, y)| format!("{}->{}", names[x], names[y])).collect();
    eprintln!(
        "{} samples, acceptance rate {:.3}, modal DAG [{}]",
        run.samples.len(),
        run.acceptance_rate(),
        edges.join(", ")
    );
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let (truth, truth_names) = read_dag(&a.truth)?;
    let mut evals = Vec::new();
    let mut strategy = String::new();
    let mut seeds = Vec::new();
    for path in &a.samples {
        let (header, samples, _) = read_samples(path)?;
        if header.nodes != truth_names {
            bail!("{}: nodes {:?} do not match the truth's {:?}", path.display(), header.nodes, truth_names);
        }
        strategy = header.strategy.clone().unwrap_or_default();
        seeds.push(header.seed.to_string());
        evals.push(evaluate_replicate(&samples, &truth).with_context(|| path.display().to_string())?);
    }
    let score = strategy.parse::<Strategy>().map(|s| s.score_kind().to_string()).unwrap_or_default();
    let row = MetricsRow {
        scenario: a.scenario,
        beta: None,
        strategy,
        score,
        outcome: Ok(aggregate(&evals)?),
    };
    match &a.out {
        Some(path) => write_metrics(path, &[row], &kv(&[("seed", seeds.join(" "))]))?,
        None => {
            println!("{}", METRICS_HEADER.join(","));
            println!("{}", row.fields().join(","));
        }
    }
    Ok(())
}

fn theory(a: TheoryArgs, exec: Execution) -> Result<()> {
    let scenarios = if a.scenario.is_empty() { Scenario::ALL.to_vec() } else { a.scenario.clone() };
    let quad = Quadrature::default();
    let query = |s: Scenario, beta: f64| LimitQuery { scenario: s, beta, sigma1: a.sigma1, sigma2: a.sigma2, p: a.p };
    if a.beta.is_empty() {
        for s in scenarios {
            let rows = theory_curves(&query(s, 0.0), &default_beta_grid(s), &quad)?;
            let path = a.out.join(format!("theory_{s}.csv"));
            let comments = kv(&[
                ("scenario", s.to_string()),
                ("sigma1", a.sigma1.to_string()),
                ("sigma2", a.sigma2.to_string()),
                ("p", a.p.to_string()),
            ]);
            hbn_cli::io::write_curve(&path, &rows, &comments)?;
            println!("{}", path.display());
        }
        return Ok(());
    }
    let mut header = String::from("scenario,beta,r10,rtilde10");
    if a.mc_rows.is_some() {
        header.push_str(",mc_r10,mc_r10_se,mc_rtilde10,mc_rtilde10_se");
    }
    println!("{header}");
    for &s in &scenarios {
        for &beta in &a.beta {
            let q = query(s, beta);
            let mut line = format!(
                "{s},{},{},{}",
                fmt_f64(beta),
                fmt_f64(r10_limit(&q, &quad)?),
                fmt_f64(rtilde10_limit(&q, &quad)?)
            );
            if let Some(rows) = a.mc_rows {
                let mc = finite_sample_ratio_mc(&q, rows, a.replicates, a.seed, exec)?;
                for v in [mc.r10.mean, mc.r10.std_error, mc.rtilde10.mean, mc.rtilde10.std_error] {
                    line.push(',');
                    line.push_str(&fmt_f64(v));
                }
            }
            println!("{line}");
        }
    }
    Ok(())
}

fn run(a: RunArgs, exec: Execution) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.out {
        cfg.out = v;
    }
    if let Some(v) = a.replicates {
        cfg.replicates = v;
    }
    if let Some(v) = a.iterations {
        cfg.chain.iterations = v;
    }
    if !a.strategy.is_empty() {
        cfg.strategies = parse_strategies(&a.strategy)?;
    }
    if !a.scenario.is_empty() {
        cfg.scenarios = parse_scenarios(&a.scenario)?;
    }
    if !a.beta.is_empty() {
        cfg.betas = a.beta;
    }
    if a.blacklist.is_some() {
        cfg.blacklist = a.blacklist;
    }
    cfg.validate()?;
    let rows = run_experiment(&cfg, exec)?;
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    println!("{}", metrics_path(&cfg.out).display());
    if failed > 0 {
        eprintln!("{failed} of {} cells failed; see the status column", rows.len());
    }
    Ok(())
}

fn metrics_path(out: &Path) -> PathBuf {
    out.join("metrics.csv")
}
