mod common;

use common::{all_dags, gauss, random_categorical, random_continuous, rng};
use hbn_core::data::{Column, Dataset};
use hbn_core::datagen::{generate, Scenario, ScenarioConfig};
use hbn_core::exec::Execution;
use hbn_core::graph::{cpdag, Blacklist, Dag};
use hbn_core::scores::{
    bde_two_node_marginals, build_score_table, dag_log_score, BdeHyperparams, BdeScorer,
    BgeHyperparams, BgeScorer, LocalScore, ScoreKind, Scorer, TableOptions,
};
use proptest::prelude::*;
use rand::Rng;
use std::collections::HashMap;

fn classes(n: usize) -> Vec<Vec<Dag>> {
    let mut by: HashMap<_, Vec<Dag>> = HashMap::new();
    for d in all_dags(n) {
        by.entry(cpdag(&d)).or_default().push(d);
    }
    by.into_values().filter(|c| c.len() > 1).collect()
}

fn max_class_gap(scorer: &Scorer, classes: &[Vec<Dag>]) -> f64 {
    let mut worst: f64 = 0.0;
    for class in classes {
        let first = dag_log_score(&class[0], scorer).unwrap();
        for d in &class[1..] {
            worst = worst.max((dag_log_score(d, scorer).unwrap() - first).abs());
        }
    }
    worst
}

#[test]
fn bge_single_observation_matches_numeric_integration() {
    // One observation x = 0 of X1 with n = 2 defaults: X1 | tau ~ N(0, 2 / tau)
    // after integrating the mean, tau ~ Gamma(shape 3/2, rate t / 2 = 1/4).
    let shape: f64 = 1.5;
    let rate: f64 = 0.25;
    let norm = rate.powf(shape) / libm::tgamma(shape);
    let f = |tau: f64| norm * tau.powf(shape - 1.0) * (-rate * tau).exp() * (tau / (4.0 * std::f64::consts::PI)).sqrt();
    let (a, b, m) = (0.0, 400.0, 400_000);
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let oracle = (s * h / 3.0).ln();
    let d = Dataset::new(vec![Column::continuous("X1", vec![0.0]), Column::continuous("X2", vec![0.0])]).unwrap();
    let s = BgeScorer::new(&d, &BgeHyperparams::defaults(2)).unwrap();
    let v = s.log_marginal(0b01).unwrap();
    assert!((v - oracle).abs() < 1e-8, "{v} vs {oracle}");
    assert!((v - (-0.451_58)).abs() < 1e-5);
}

#[test]
fn likelihood_equivalence_on_random_data() {
    for n in 2..=4 {
        let cl = classes(n);
        let mut r = rng(100 + n as u64);
        for _ in 0..100 {
            let rows = r.random_range(5..60);
            let g = Scorer::with_defaults(ScoreKind::Bge, &random_continuous(n, rows, &mut r)).unwrap();
            assert!(max_class_gap(&g, &cl) < 1e-9);
            let c = Scorer::with_defaults(ScoreKind::Bde, &random_categorical(n, rows, &mut r)).unwrap();
            assert!(max_class_gap(&c, &cl) < 1e-9);
        }
    }
}

#[test]
fn bde_matches_two_node_closed_form() {
    let mut r = rng(7);
    for _ in 0..50 {
        let counts: [u64; 4] = std::array::from_fn(|_| r.random_range(0..25));
        let a: f64 = r.random_range(0.05..3.0);
        let mut x1 = Vec::new();
        let mut x2 = Vec::new();
        for (cell, &c) in counts.iter().enumerate() {
            let (v1, v2) = [(1, 1), (1, 0), (0, 1), (0, 0)][cell];
            for _ in 0..c {
                x1.push(v1);
                x2.push(v2);
            }
        }
        if x1.is_empty() {
            continue;
        }
        let d = Dataset::new(vec![Column::categorical("X1", 2, x1), Column::categorical("X2", 2, x2)]).unwrap();
        let s = BdeScorer::new(&d, &BdeHyperparams { ess: 4.0 * a }).unwrap();
        let (g1, g0) = bde_two_node_marginals(counts, [a; 4]);
        let s1 = s.local_score(0, 0).unwrap() + s.local_score(1, 0b01).unwrap();
        let s0 = s.local_score(0, 0).unwrap() + s.local_score(1, 0).unwrap();
        assert!((s1 - g1).abs() < 1e-12, "{s1} vs {g1}");
        assert!((s0 - g0).abs() < 1e-12, "{s0} vs {g0}");
    }
}

#[test]
fn table_sums_equal_dag_scores_exactly() {
    let data = random_continuous(4, 50, &mut rng(3));
    let s = Scorer::with_defaults(ScoreKind::Bge, &data).unwrap();
    let t = build_score_table(&s, &Blacklist::none(4), &TableOptions::default()).unwrap();
    for d in all_dags(4) {
        assert_eq!(t.dag_score(&d).unwrap(), dag_log_score(&d, &s).unwrap());
    }
    let seq = build_score_table(
        &s,
        &Blacklist::none(4),
        &TableOptions { exec: Execution::Sequential, ..Default::default() },
    )
    .unwrap();
    for v in 0..4 {
        assert_eq!(seq.entries(v), t.entries(v));
    }
}

#[test]
fn bge_is_invariant_to_row_order() {
    let data = random_continuous(3, 80, &mut rng(11));
    let mut order: Vec<usize> = (0..80).collect();
    order.reverse();
    order.swap(3, 40);
    let shuffled = data.permute_rows(&order);
    let hp = BgeHyperparams::defaults(3);
    let a = BgeScorer::new(&data, &hp).unwrap();
    let b = BgeScorer::new(&shuffled, &hp).unwrap();
    for subset in 1..8u64 {
        assert!((a.log_marginal(subset).unwrap() - b.log_marginal(subset).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn four_node_family_score_two_ways() {
    let (data, _) = generate(&ScenarioConfig::four_node(Scenario::Cc, 300, 5)).unwrap();
    let s = BgeScorer::new(&data, &BgeHyperparams::defaults(4)).unwrap();
    let direct = s.local_score(1, 0b0101).unwrap();
    let via_chain = s.local_score(0, 0).unwrap() + s.local_score(1, 0b0001).unwrap() + s.local_score(2, 0b0011).unwrap()
        - s.local_score(0, 0).unwrap()
        - s.local_score(2, 0b0001).unwrap();
    assert!((direct - via_chain).abs() < 1e-9);
    assert!((direct - (s.log_marginal(0b0111).unwrap() - s.log_marginal(0b0101).unwrap())).abs() < 1e-9);
}

#[test]
fn identical_columns_give_a_large_ratio() {
    let mut r = rng(21);
    for n_rows in [50, 100, 200] {
        let x: Vec<f64> = (0..n_rows).map(|_| gauss(&mut r)).collect();
        let d = Dataset::new(vec![Column::continuous("X1", x.clone()), Column::continuous("X2", x)]).unwrap();
        let s = BgeScorer::new(&d, &BgeHyperparams::defaults(2)).unwrap();
        let ratio = s.local_score(1, 0b01).unwrap() - s.local_score(1, 0).unwrap();
        assert!(ratio > 0.3 * n_rows as f64, "N={n_rows}: {ratio}");
    }
}

#[test]
fn per_row_bge_ratio_approaches_its_limit() {
    // cc with beta = 1: Sigma = [[1, 1], [1, 2]], limit 0.5 ln 2.
    let (d, _) = generate(&ScenarioConfig::two_node(Scenario::Cc, 1.0, 100_000, 8)).unwrap();
    let s = BgeScorer::new(&d, &BgeHyperparams::defaults(2)).unwrap();
    let r = (s.local_score(1, 0b01).unwrap() - s.local_score(1, 0).unwrap()) / 100_000.0;
    assert!((r - 0.5 * std::f64::consts::LN_2).abs() < 0.01, "{r}");
}

proptest! {
    #[test]
    fn two_node_bge_equivalence(xs in proptest::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 1..40)) {
        let d = Dataset::new(vec![
            Column::continuous("X1", xs.iter().map(|p| p.0).collect()),
            Column::continuous("X2", xs.iter().map(|p| p.1).collect()),
        ]).unwrap();
        let s = BgeScorer::new(&d, &BgeHyperparams::defaults(2)).unwrap();
        let fwd = s.local_score(0, 0).unwrap() + s.local_score(1, 1).unwrap();
        let bwd = s.local_score(1, 0).unwrap() + s.local_score(0, 2).unwrap();
        prop_assert!((fwd - bwd).abs() < 1e-9 * (1.0 + fwd.abs()));
    }

    #[test]
    fn table_never_contains_blacklisted_parents(edges in proptest::collection::vec((0usize..5, 0usize..5), 0..8)) {
        let edges: Vec<(usize, usize)> = edges.into_iter().filter(|(a, b)| a != b).collect();
        let bl = Blacklist::new(5, edges.clone()).unwrap();
        let data = random_continuous(5, 20, &mut rng(1));
        let s = Scorer::with_defaults(ScoreKind::Bge, &data).unwrap();
        let t = build_score_table(&s, &bl, &TableOptions { max_parents: Some(2), ..Default::default() }).unwrap();
        for v in 0..5 {
            for &(p, score) in t.entries(v) {
                prop_assert!(score.is_finite());
                prop_assert!(p.count_ones() <= 2);
                prop_assert_eq!(p & bl.forbidden_parents(v), 0);
            }
        }
    }
}
