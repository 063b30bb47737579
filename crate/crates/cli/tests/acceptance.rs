//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Every stochastic check runs at the default seed.

use hbn_cli::config::ExperimentConfig;
use hbn_cli::experiment::run_experiment;
use hbn_cli::io::{read_samples, MetricsRow};
use hbn_cli::reproduce::{table2_betas, table2_rows, table3_rows, ReproduceOptions};
use hbn_cli::strategy::Strategy;
use hbn_core::data::{Column, Dataset};
use hbn_core::datagen::Scenario;
use hbn_core::exec::Execution;
use hbn_core::graph::{bit, cpdag, dag_to_partition, Blacklist, Dag, NodeSet};
use hbn_core::numeric::log_sum_exp;
use hbn_core::quadrature::Quadrature;
use hbn_core::rng::{stream_rng, ChainRng};
use hbn_core::sampler::{partition_mcmc, structure_mcmc, ChainConfig, PosteriorSamples};
use hbn_core::scores::{
    bde_two_node_marginals, build_score_table, dag_log_score, BdeHyperparams, BdeScorer, LocalScore,
    ScoreKind, Scorer, TableOptions,
};
use hbn_core::theory::{
    default_beta_grid, finite_sample_ratio_mc, p11_tilde, r10_limit, rtilde10_limit, theory_curves,
    LimitQuery,
};
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::time::Instant;

const SEED: u64 = 1;
const NAMES: [&str; 4] = ["A", "B", "C", "D"];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol
}

/// Every DAG on `n` nodes.
fn all_dags(n: usize) -> Vec<Dag> {
    let full = (1u64 << n) - 1;
    let mut out = Vec::new();
    let mut parents = vec![0; n];
    fn rec(v: usize, full: NodeSet, parents: &mut Vec<NodeSet>, out: &mut Vec<Dag>) {
        if v == parents.len() {
            if let Ok(d) = Dag::from_parent_sets(parents.clone()) {
                out.push(d);
            }
            return;
        }
        let others = full & !bit(v);
        let mut sub = others;
        loop {
            parents[v] = sub;
            rec(v + 1, full, parents, out);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others;
        }
    }
    rec(0, full, &mut parents, &mut out);
    out
}

fn random_continuous(n: usize, rows: usize, rng: &mut ChainRng) -> Dataset {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let w: Vec<f64> = (0..j).map(|_| rng.random_range(-1.5..1.5)).collect();
        let col = (0..rows)
            .map(|r| {
                let noise: f64 = rng.sample(StandardNormal);
                w.iter().enumerate().map(|(k, wk)| wk * cols[k][r]).sum::<f64>() + noise + 0.3
            })
            .collect();
        cols.push(col);
    }
    let cols = cols.into_iter().enumerate().map(|(j, v)| Column::continuous(NAMES[j], v)).collect();
    Dataset::new(cols).expect("valid data")
}

fn random_categorical(n: usize, rows: usize, rng: &mut ChainRng) -> Dataset {
    let levels: Vec<usize> = (0..n).map(|_| rng.random_range(2..=3)).collect();
    let mut cols: Vec<Vec<u32>> = Vec::with_capacity(n);
    for j in 0..n {
        let col = (0..rows)
            .map(|r| {
                if j > 0 && rng.random::<f64>() < 0.5 {
                    cols[j - 1][r] % levels[j] as u32
                } else {
                    rng.random_range(0..levels[j] as u32)
                }
            })
            .collect();
        cols.push(col);
    }
    let cols = cols
        .into_iter()
        .enumerate()
        .map(|(j, v)| Column::categorical(NAMES[j], levels[j], v))
        .collect();
    Dataset::new(cols).expect("valid data")
}

fn criterion_1() -> Outcome {
    let quad = Quadrature::default();
    let mut dc = LimitQuery::new(Scenario::Dc, 2.0);
    dc.sigma2 = 1.0;
    let got = [
        r10_limit(&LimitQuery::new(Scenario::Cc, 1.0), &quad).map_err(|e| e.to_string())?,
        r10_limit(&LimitQuery::new(Scenario::Dd, 0.5), &quad).map_err(|e| e.to_string())?,
        r10_limit(&dc, &quad).map_err(|e| e.to_string())?,
    ];
    // The listed targets are the exact values ½ln2, ½ln(4/3), ½ln2 printed
    // to 7 decimals: 1e-9 applies to the exact values, the printed digits
    // must agree to their own rounding.
    let exact = [0.5 * LN_2, 0.5 * (4.0f64 / 3.0).ln(), 0.5 * LN_2];
    let printed = [0.3465736, 0.1438410, 0.3465736];
    let ok = (0..3).all(|i| close(got[i], exact[i], 1e-9) && close(got[i], printed[i], 5e-8));
    check(ok, format!("cc {:.10} dd {:.10} dc {:.10} (tol 1e-9 to exact)", got[0], got[1], got[2]))
}

fn criterion_2() -> Outcome {
    let quad = Quadrature::default();
    let cc = LimitQuery::new(Scenario::Cc, 1.0);
    let p11 = p11_tilde(&cc, &quad).map_err(|e| e.to_string())?;
    // Orthant probability of a bivariate normal with correlation ρ = 1/√2.
    let rho = 1.0 / 2f64.sqrt();
    let orthant = 0.25 + rho.asin() / (2.0 * PI);
    let rt_cc = rtilde10_limit(&cc, &quad).map_err(|e| e.to_string())?;
    let rt_dd = rtilde10_limit(&LimitQuery::new(Scenario::Dd, 0.5), &quad).map_err(|e| e.to_string())?;
    let ok = close(p11, 0.375, 1e-8)
        && close(p11, orthant, 1e-8)
        && close(rt_cc, 0.130812, 1e-5)
        && close(rt_dd, 0.130812, 1e-6);
    check(ok, format!("p11 {p11:.12} rtilde10 cc {rt_cc:.8} dd {rt_dd:.8}"))
}

fn criterion_3() -> Outcome {
    let quad = Quadrature::default();
    let mut bad = Vec::new();
    for s in Scenario::ALL {
        let grid: Vec<f64> = match s {
            Scenario::Dd => (0..=90).map(|i| i as f64 / 100.0).collect(),
            _ => default_beta_grid(s),
        };
        let rows = theory_curves(&LimitQuery::new(s, 0.0), &grid, &quad).map_err(|e| e.to_string())?;
        for r in rows {
            let zero = r.beta != 0.0 || (r.r10.abs() < 1e-12 && r.rtilde10.abs() < 1e-12);
            let dominated = r.beta == 0.0 || r.r10 > r.rtilde10;
            let capped = r.rtilde10 <= LN_2 + 1e-12;
            if !(zero && dominated && capped) {
                bad.push(format!("{s} beta={} r10={} rtilde10={}", r.beta, r.r10, r.rtilde10));
            }
        }
    }
    check(bad.is_empty(), if bad.is_empty() { "all grid points ok".into() } else { bad.join("; ") })
}

fn criterion_4() -> Outcome {
    let quad = Quadrature::default();
    let mut lines = Vec::new();
    let mut ok = true;
    for s in Scenario::ALL {
        let betas = if s == Scenario::Dd { [0.25, 0.5] } else { [0.5, 1.0] };
        for beta in betas {
            let q = LimitQuery::new(s, beta);
            let mc = finite_sample_ratio_mc(&q, 100_000, 20, SEED, Execution::default())
                .map_err(|e| e.to_string())?;
            for (name, est, limit) in [
                ("r10", mc.r10, r10_limit(&q, &quad).map_err(|e| e.to_string())?),
                ("rtilde10", mc.rtilde10, rtilde10_limit(&q, &quad).map_err(|e| e.to_string())?),
            ] {
                let tol = f64::max(0.01, 3.0 * est.std_error);
                let hit = close(est.mean, limit, tol);
                ok &= hit;
                if !hit {
                    lines.push(format!("{s} beta={beta} {name} mc {:.5} limit {limit:.5} tol {tol:.5}", est.mean));
                }
            }
        }
    }
    check(ok, if ok { "16 comparisons within max(0.01, 3se)".into() } else { lines.join("; ") })
}

fn total_variation(run: &PosteriorSamples, exact: &HashMap<Dag, f64>) -> f64 {
    let mut freq: HashMap<&Dag, f64> = HashMap::new();
    for s in &run.samples {
        *freq.entry(&s.dag).or_insert(0.0) += 1.0 / run.len() as f64;
    }
    exact.iter().map(|(d, p)| (freq.get(d).copied().unwrap_or(0.0) - p).abs()).sum::<f64>() / 2.0
}

fn criterion_5() -> Outcome {
    let data = random_continuous(3, 12, &mut stream_rng(SEED, 5));
    let scorer = Scorer::with_defaults(ScoreKind::Bge, &data).map_err(|e| e.to_string())?;
    let dags = all_dags(3);
    let scores = dags
        .iter()
        .map(|d| dag_log_score(d, &scorer))
        .collect::<hbn_core::Result<Vec<f64>>>()
        .map_err(|e| e.to_string())?;
    let z = log_sum_exp(&scores);
    let exact: HashMap<Dag, f64> = dags.into_iter().zip(scores).map(|(d, s)| (d, (s - z).exp())).collect();
    let table = build_score_table(&scorer, &Blacklist::none(3), &TableOptions::default())
        .map_err(|e| e.to_string())?;
    let cfg = ChainConfig::new(62_500, SEED);
    let p = partition_mcmc(&table, &cfg, &mut cfg.rng()).map_err(|e| e.to_string())?;
    let s = structure_mcmc(&table, &cfg, &mut cfg.rng()).map_err(|e| e.to_string())?;
    let (tp, ts) = (total_variation(&p, &exact), total_variation(&s, &exact));
    let ok = exact.len() == 25 && p.len() == 50_000 && s.len() == 50_000 && tp < 0.05 && ts < 0.05;
    check(ok, format!("{} DAGs, {} kept; TV partition {tp:.4} structure {ts:.4}", exact.len(), p.len()))
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        let mut by: HashMap<_, Vec<Dag>> = HashMap::new();
        for d in all_dags(n) {
            by.entry(cpdag(&d)).or_default().push(d);
        }
        let classes: Vec<Vec<Dag>> = by.into_values().filter(|c| c.len() > 1).collect();
        let mut rng = stream_rng(SEED, 60 + n as u64);
        for _ in 0..100 {
            let rows = rng.random_range(5..60);
            for data in [random_continuous(n, rows, &mut rng), random_categorical(n, rows, &mut rng)] {
                let kind = if data.column(0).kind.is_continuous() { ScoreKind::Bge } else { ScoreKind::Bde };
                let s = Scorer::with_defaults(kind, &data).map_err(|e| e.to_string())?;
                for class in &classes {
                    let first = dag_log_score(&class[0], &s).map_err(|e| e.to_string())?;
                    for d in &class[1..] {
                        let v = dag_log_score(d, &s).map_err(|e| e.to_string())?;
                        worst = worst.max((v - first).abs());
                    }
                }
            }
        }
    }
    let mut rng = stream_rng(SEED, 66);
    let mut closed: f64 = 0.0;
    let mut tables = 0;
    while tables < 50 {
        let counts: [u64; 4] = std::array::from_fn(|_| rng.random_range(0..25));
        if counts.iter().sum::<u64>() == 0 {
            continue;
        }
        let a: f64 = rng.random_range(0.05..3.0);
        let (mut x1, mut x2) = (Vec::new(), Vec::new());
        for (cell, &c) in counts.iter().enumerate() {
            let (v1, v2) = [(1, 1), (1, 0), (0, 1), (0, 0)][cell];
            x1.extend(std::iter::repeat_n(v1, c as usize));
            x2.extend(std::iter::repeat_n(v2, c as usize));
        }
        let d = Dataset::new(vec![Column::categorical("X1", 2, x1), Column::categorical("X2", 2, x2)])
            .map_err(|e| e.to_string())?;
        let s = BdeScorer::new(&d, &BdeHyperparams { ess: 4.0 * a }).map_err(|e| e.to_string())?;
        let local = |v, p| s.local_score(v, p).map_err(|e| e.to_string());
        let (g1, g0) = bde_two_node_marginals(counts, [a; 4]);
        closed = closed.max((local(0, 0)? + local(1, 0b01)? - g1).abs());
        closed = closed.max((local(0, 0)? + local(1, 0)? - g0).abs());
        tables += 1;
    }
    check(
        worst < 1e-9 && closed < 1e-12,
        format!("max equivalence gap {worst:.2e}; max closed-form gap {closed:.2e}"),
    )
}

fn find(rows: &[MetricsRow], s: Scenario, beta: Option<f64>, st: Strategy) -> Result<&MetricsRow, String> {
    rows.iter()
        .find(|r| r.scenario == s.to_string() && r.beta == beta && r.strategy == st.to_string())
        .ok_or_else(|| format!("missing row {s} {beta:?} {st}"))
}

fn metric(rows: &[MetricsRow], s: Scenario, beta: Option<f64>, st: Strategy, f: fn(&hbn_core::metrics::EvalReport) -> f64) -> Result<f64, String> {
    let row = find(rows, s, beta, st)?;
    row.outcome.as_ref().map(f).map_err(|e| format!("{s} {st}: {e}"))
}

fn criterion_7() -> Outcome {
    let rows = table2_rows(&ReproduceOptions::default(), Execution::default()).map_err(|e| e.to_string())?;
    let tpr = |s, b, st| metric(&rows, s, Some(b), st, |r| r.tpr);
    let (rag, disc) = (Strategy::Rag, Strategy::Disc(2));
    let mut notes = Vec::new();
    let a_rag = tpr(Scenario::Cc, 0.5, rag)?;
    let a_disc = tpr(Scenario::Cc, 0.5, disc)?;
    let a = a_rag >= 0.9 && (0.65..=0.95).contains(&a_disc);
    notes.push(format!("(a) cc 0.5 rag {a_rag} disc-2 {a_disc}"));
    let mut b = true;
    let mut c = true;
    for s in Scenario::ALL {
        let mid = if s == Scenario::Dd { 0.4 } else { 0.5 };
        let (r, d) = (tpr(s, mid, rag)?, tpr(s, mid, disc)?);
        b &= r >= d;
        let top = *table2_betas(s).last().expect("nonempty grid");
        let (rt, dt) = (tpr(s, top, rag)?, tpr(s, top, disc)?);
        c &= rt == 1.0 && dt == 1.0;
        notes.push(format!("{s} mid {r}/{d} top {rt}/{dt}"));
    }
    notes.push(format!("(a) {a} (b) {b} (c) {c}"));
    check(a && b && c, notes.join("; "))
}

fn criterion_8() -> Outcome {
    let rows = table3_rows(&ReproduceOptions::default(), Execution::default()).map_err(|e| e.to_string())?;
    let shd = |s, st| metric(&rows, s, None, st, |r| r.shd);
    let (rag, disc) = (Strategy::Rag, Strategy::Disc(2));
    let cc_rag = shd(Scenario::Cc, rag)?;
    let cc_disc = shd(Scenario::Cc, disc)?;
    let mut ok = cc_rag <= 0.5 && cc_disc >= 3.0;
    let mut notes = vec![format!("cc rag {cc_rag} <= 0.5, disc-2 {cc_disc} >= 3")];
    for s in Scenario::ALL {
        let (r, d) = (shd(s, rag)?, shd(s, disc)?);
        ok &= r < d;
        notes.push(format!("{s} rag {r} {} disc-2 {d}", if r < d { "<" } else { "NOT <" }));
    }
    check(ok, notes.join("; "))
}

fn criterion_9() -> Outcome {
    // X3 → X1 ← X4, X1 → X2 ← X5 with 0-based indices.
    let dag = Dag::new(5, [(2, 0), (3, 0), (0, 1), (4, 1)]).map_err(|e| e.to_string())?;
    let p = dag_to_partition(&dag);
    let (perm, sizes) = (p.permutation(), p.block_sizes());
    check(perm == [1, 0, 2, 3, 4] && sizes == [1, 1, 3], format!("permutation {perm:?} block sizes {sizes:?}"))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let blacklist = dir.path().join("blacklist.csv");
    // Includes both true edges into B.
    std::fs::write(&blacklist, "from,to\nA,B\nC,B\nB,A\nD,A\nB,D\n").map_err(|e| e.to_string())?;
    let mut cfg = ExperimentConfig {
        scenarios: vec![Scenario::Cc],
        node_count: 4,
        betas: Vec::new(),
        strategies: vec![Strategy::Rag, Strategy::Disc(2)],
        replicates: 2,
        blacklist: Some(blacklist),
        out: dir.path().join("run"),
        seed: SEED,
        write_samples: true,
        ..ExperimentConfig::default()
    };
    cfg.chain.iterations = 20_000;
    run_experiment(&cfg, Execution::default()).map_err(|e| e.to_string())?;
    let forbidden = [("A", "B"), ("C", "B"), ("B", "A"), ("D", "A"), ("B", "D")];
    let (mut files, mut samples, mut hits) = (0, 0, 0);
    for entry in std::fs::read_dir(cfg.out.join("samples")).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let (header, run, _) = read_samples(&path).map_err(|e| e.to_string())?;
        let index = |n: &str| header.nodes.iter().position(|m| m == n).expect("known node");
        files += 1;
        samples += run.len();
        hits += run
            .iter()
            .filter(|s| forbidden.iter().any(|&(a, b)| s.dag.has_edge(index(a), index(b))))
            .count();
    }
    check(
        files == 4 && samples == 4 * 16_000 && hits == 0,
        format!("{files} sample files, {samples} samples, {hits} with a blacklisted edge"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("theory closed forms", criterion_1),
        ("quadrature limits", criterion_2),
        ("limit curve shapes", criterion_3),
        ("Monte Carlo limit validation", criterion_4),
        ("exact three-node posterior", criterion_5),
        ("score equivalence and closed form", criterion_6),
        ("two-node desk-scale table", criterion_7),
        ("four-node desk-scale table", criterion_8),
        ("DAG to ordered partition", criterion_9),
        ("blacklist respected", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} [{secs:.1}s] {name}: {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
