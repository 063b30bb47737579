use hbn_cli::io::{
    fmt_f64, parse_f64, read_dag, read_dataset, read_metrics, read_samples, schema_path_for, write_dag,
    write_dataset, write_metrics, write_samples, MetricsRow, SampleHeader,
};
use hbn_core::data::{Column, Dataset};
use hbn_core::datagen::{generate, Scenario, ScenarioConfig};
use hbn_core::graph::{Blacklist, Dag};
use hbn_core::metrics::EvalReport;
use hbn_core::sampler::{partition_mcmc, ChainConfig};
use hbn_core::scores::{build_score_table, ScoreKind, Scorer, TableOptions};

#[test]
fn dataset_round_trip_keeps_kinds_and_labels() {
    let dir = tempfile::tempdir().unwrap();
    let (data, _) = generate(&ScenarioConfig::four_node(Scenario::Dc, 50, 3)).unwrap();
    let path = dir.path().join("data.csv");
    write_dataset(&path, &data, &[("seed".into(), "3".into())]).unwrap();
    let back = read_dataset(&path, &schema_path_for(&path)).unwrap();
    assert_eq!(back, data);
    assert!(back.columns().iter().any(|c| c.level_values.is_some()));
}

#[test]
fn continuous_values_survive_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let vals = vec![0.1, -1e-300, 1.0 / 3.0, 123456.789, f64::MIN_POSITIVE];
    let d = Dataset::new(vec![Column::continuous("x", vals.clone())]).unwrap();
    let path = dir.path().join("d.csv");
    write_dataset(&path, &d, &[]).unwrap();
    let back = read_dataset(&path, &schema_path_for(&path)).unwrap();
    assert_eq!(back.column(0).values, vals);
}

#[test]
fn dataset_with_unknown_column_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = Dataset::new(vec![Column::continuous("x", vec![1.0, 2.0])]).unwrap();
    let path = dir.path().join("d.csv");
    write_dataset(&path, &d, &[]).unwrap();
    std::fs::write(&path, "y\n1\n2\n").unwrap();
    assert!(read_dataset(&path, &schema_path_for(&path)).is_err());
}

#[test]
fn dag_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let dag = Dag::new(4, [(0, 1), (2, 1), (0, 3), (2, 3)]).unwrap();
    let names: Vec<String> = ["A", "B", "C", "D"].map(String::from).to_vec();
    let path = dir.path().join("truth.csv");
    write_dag(&path, &dag, &names, &[]).unwrap();
    assert_eq!(read_dag(&path).unwrap(), (dag, names));
}

#[test]
fn samples_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (data, _) = generate(&ScenarioConfig::four_node(Scenario::Cc, 100, 1)).unwrap();
    let s = Scorer::with_defaults(ScoreKind::Bge, &data).unwrap();
    let t = build_score_table(&s, &Blacklist::none(4), &TableOptions::default()).unwrap();
    let cfg = ChainConfig::new(2_000, 5);
    let run = partition_mcmc(&t, &cfg, &mut cfg.rng()).unwrap();
    let header = SampleHeader::new(data.names(), "partition", &cfg);
    let path = dir.path().join("s.jsonl");
    write_samples(&path, &header, &run).unwrap();
    let (h, samples, summary) = read_samples(&path).unwrap();
    assert_eq!(h, header);
    assert_eq!(samples, run.samples);
    let summary = summary.unwrap();
    assert_eq!(summary.samples, run.len());
    assert_eq!(summary.accepted, run.accepted);
}

#[test]
fn samples_without_header_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.jsonl");
    std::fs::write(&path, "{\"iteration\":1,\"edges\":[],\"log_score\":0.0}\n").unwrap();
    assert!(read_samples(&path).is_err());
}

#[test]
fn metrics_sentinels_and_error_rows() {
    let dir = tempfile::tempdir().unwrap();
    let report = |fr| EvalReport { replicates: 3, tp: 1.0, fp: 0.0, fn_: 0.0, tpr: 1.0, shd: 0.0, fr };
    let rows = vec![
        MetricsRow { scenario: "cc".into(), beta: Some(0.5), strategy: "rag".into(), score: "bge".into(), outcome: Ok(report(Some(f64::INFINITY))) },
        MetricsRow { scenario: "cc".into(), beta: Some(0.5), strategy: "disc-2".into(), score: "bde".into(), outcome: Ok(report(None)) },
        MetricsRow { scenario: "dd".into(), beta: None, strategy: "rag".into(), score: "bge".into(), outcome: Err("boom".into()) },
    ];
    let path = dir.path().join("m.csv");
    write_metrics(&path, &rows, &[("seed".into(), "1".into())]).unwrap();
    let back = read_metrics(&path).unwrap();
    assert_eq!(back.len(), 3);
    assert_eq!(back[0]["fr"], "inf");
    assert_eq!(back[1]["fr"], "nan");
    assert_eq!(back[2]["status"], "error: boom");
    assert_eq!(back[2]["shd"], "");
    assert_eq!(back[2]["beta"], "");
    assert_eq!(parse_f64(&back[0]["beta"]), Some(0.5));
}

#[test]
fn float_formatting_round_trips() {
    for v in [0.0, -0.0, 1.5, f64::INFINITY, f64::NEG_INFINITY, 1e-310, 0.1 + 0.2] {
        assert_eq!(parse_f64(&fmt_f64(v)).unwrap().to_bits(), v.to_bits());
    }
    assert!(parse_f64(&fmt_f64(f64::NAN)).unwrap().is_nan());
}
