//! Forbidden-edge lists: CSV with header `from,to` over node names.

use crate::error::Result;
use crate::io::{read_edge_names, resolve_edges};
use std::collections::BTreeSet;
use std::path::Path;

/// Distinct forbidden `(from, to)` name pairs, file order kept.
pub fn read_blacklist_names(path: &Path) -> Result<Vec<(String, String)>> {
    let mut seen = BTreeSet::new();
    Ok(read_edge_names(path)?.into_iter().filter(|e| seen.insert(e.clone())).collect())
}

/// Forbidden edges as index pairs into `names`, deduplicated and sorted.
pub fn load_blacklist(path: &Path, names: &[String]) -> Result<BTreeSet<(usize, usize)>> {
    Ok(resolve_edges(&read_blacklist_names(path)?, names)?.into_iter().collect())
}
