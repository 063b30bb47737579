//! Dirichlet-multinomial family score with uniform (BDeu) pseudocounts.

use super::{check_family, LocalScore};
use crate::data::{ColumnKind, Dataset};
use crate::error::{Error, Result};
use crate::graph::{members, NodeSet};
use crate::numeric::ln_gamma;
use std::collections::HashMap;

/// Largest `q * r` for which counts go in a dense array.
pub const DENSE_COUNT_LIMIT: u128 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BdeHyperparams {
    /// Equivalent sample size spread uniformly over each family's joint cells.
    pub ess: f64,
}

impl Default for BdeHyperparams {
    fn default() -> Self {
        Self { ess: 1.0 }
    }
}

impl BdeHyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.ess > 0.0 && self.ess.is_finite()) {
            return Err(Error::InvalidHyperparameters(format!(
                "ess must be positive, got {}",
                self.ess
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct BdeScorer {
    levels: Vec<usize>,
    /// Column-major level codes.
    codes: Vec<Vec<u32>>,
    ess: f64,
}

impl BdeScorer {
    /// All columns must be categorical.
    pub fn new(data: &Dataset, hp: &BdeHyperparams) -> Result<Self> {
        hp.validate()?;
        let mut levels = Vec::with_capacity(data.n_cols());
        let mut codes = Vec::with_capacity(data.n_cols());
        for col in data.columns() {
            match col.kind {
                ColumnKind::Categorical { levels: k } => {
                    levels.push(k);
                    codes.push(col.values.iter().map(|&v| v as u32).collect());
                }
                ColumnKind::Continuous => {
                    return Err(Error::IncompatibleColumn {
                        column: col.name.clone(),
                        expected: "categorical",
                    })
                }
            }
        }
        Ok(Self { levels, codes, ess: hp.ess })
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    fn family_score<I: Iterator<Item = (u64, u64)>>(cells: I, q: f64, r: f64, ess: f64) -> f64 {
        // `cells` yields (parent configuration, N_ijk) grouped arbitrarily;
        // per-configuration totals are accumulated alongside.
        let a_ijk = ess / (q * r);
        let a_ij = ess / q;
        let mut totals: HashMap<u64, u64> = HashMap::new();
        let mut score = 0.0;
        for (j, count) in cells {
            if count > 0 {
                score += ln_gamma(a_ijk + count as f64) - ln_gamma(a_ijk);
                *totals.entry(j).or_insert(0) += count;
            }
        }
        for &n_ij in totals.values() {
            score += ln_gamma(a_ij) - ln_gamma(a_ij + n_ij as f64);
        }
        score
    }
}

impl LocalScore for BdeScorer {
    fn node_count(&self) -> usize {
        self.levels.len()
    }

    fn local_score(&self, node: usize, parents: NodeSet) -> Result<f64> {
        check_family(node, parents, self.levels.len())?;
        let pa: Vec<usize> = members(parents).collect();
        let r = self.levels[node] as u128;
        let q: u128 = pa.iter().map(|&p| self.levels[p] as u128).product();
        let rows = self.codes[node].len();
        let config = |row: usize| -> u64 {
            let mut j = 0u64;
            for &p in &pa {
                j = j * self.levels[p] as u64 + u64::from(self.codes[p][row]);
            }
            j
        };
        let child = &self.codes[node];
        let (qf, rf) = (q as f64, r as f64);
        if q * r <= DENSE_COUNT_LIMIT {
            let r = r as usize;
            let mut counts = vec![0u64; q as usize * r];
            for row in 0..rows {
                counts[config(row) as usize * r + child[row] as usize] += 1;
            }
            let a_ijk = self.ess / (qf * rf);
            let a_ij = self.ess / qf;
            let (lg_ijk, lg_ij) = (ln_gamma(a_ijk), ln_gamma(a_ij));
            let mut score = 0.0;
            for cfg in counts.chunks_exact(r) {
                let n_ij: u64 = cfg.iter().sum();
                if n_ij == 0 {
                    continue;
                }
                score += lg_ij - ln_gamma(a_ij + n_ij as f64);
                for &c in cfg {
                    if c > 0 {
                        score += ln_gamma(a_ijk + c as f64) - lg_ijk;
                    }
                }
            }
            Ok(score)
        } else {
            let mut sparse: HashMap<(u64, u32), u64> = HashMap::new();
            for row in 0..rows {
                *sparse.entry((config(row), child[row])).or_insert(0) += 1;
            }
            Ok(Self::family_score(sparse.into_iter().map(|((j, _), c)| (j, c)), qf, rf, self.ess))
        }
    }
}

/// Closed-form `(ln P(X | X1 -> X2), ln P(X | empty))` for two binary
/// variables with counts `(N11, N10, N01, N00)` and cell pseudocounts
/// `(a1, a2, a3, a4)` in the same order. Both margins of the empty graph use
/// the row sums `(a1 + a2, a3 + a4)`.
pub fn bde_two_node_marginals(counts: [u64; 4], alpha: [f64; 4]) -> (f64, f64) {
    let n: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let total_alpha: f64 = alpha.iter().sum();
    let total_n: f64 = n.iter().sum();
    let mut g1 = ln_gamma(total_alpha) - ln_gamma(total_alpha + total_n);
    for i in 0..4 {
        g1 += ln_gamma(alpha[i] + n[i]) - ln_gamma(alpha[i]);
    }
    let a12 = alpha[0] + alpha[1];
    let a34 = alpha[2] + alpha[3];
    let ln_b = |a: f64, b: f64| ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    let (n1_, n0_) = (n[0] + n[1], n[2] + n[3]);
    let (n_1, n_0) = (n[0] + n[2], n[1] + n[3]);
    let g0 = -2.0 * ln_b(a12, a34) + ln_b(a12 + n1_, a34 + n0_) + ln_b(a12 + n_1, a34 + n_0);
    (g1, g0)
}
