use hbn_cli::blacklist::{load_blacklist, read_blacklist_names};
use hbn_cli::CliError;
use std::collections::BTreeSet;
use std::path::PathBuf;

fn names() -> Vec<String> {
    ["SE", "SX", "LS", "FY"].map(String::from).to_vec()
}

fn file(dir: &tempfile::TempDir, body: &str) -> PathBuf {
    let p = dir.path().join("bl.csv");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn header_only_file_forbids_nothing() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_blacklist(&file(&dir, "from,to\n"), &names()).unwrap().is_empty());
}

#[test]
fn single_row_resolves_to_indices() {
    let dir = tempfile::tempdir().unwrap();
    let got = load_blacklist(&file(&dir, "from,to\nSE,SX\n"), &names()).unwrap();
    assert_eq!(got, BTreeSet::from([(0, 1)]));
}

#[test]
fn duplicates_collapse_in_file_order() {
    let dir = tempfile::tempdir().unwrap();
    let p = file(&dir, "from,to\nLS,FY\nSE,SX\nLS,FY\n# note\n");
    let got = read_blacklist_names(&p).unwrap();
    assert_eq!(got, vec![("LS".into(), "FY".into()), ("SE".into(), "SX".into())]);
}

#[test]
fn unknown_node_is_reported_by_name() {
    let dir = tempfile::tempdir().unwrap();
    match load_blacklist(&file(&dir, "from,to\nSE,GPA\n"), &names()) {
        Err(CliError::UnknownNode { name, .. }) => assert_eq!(name, "GPA"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn malformed_rows_and_headers_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_blacklist(&file(&dir, "from,to\nSE\n"), &names()).is_err());
    assert!(load_blacklist(&file(&dir, "from,to\nSE,\n"), &names()).is_err());
    assert!(load_blacklist(&file(&dir, "a,b\nSE,SX\n"), &names()).is_err());
}
