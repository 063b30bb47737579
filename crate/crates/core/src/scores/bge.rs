//! Gaussian marginal likelihood under a Normal-Wishart prior.

use super::{check_family, LocalScore};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::{bit, members, NodeSet};
use crate::numeric::{ln_det_spd, ln_multigamma};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub struct BgeHyperparams {
    pub alpha_mu: f64,
    pub alpha_w: f64,
    /// Prior mean vector, one entry per node.
    pub nu: Vec<f64>,
    /// Prior matrix is `t * I`.
    pub t: f64,
}

impl BgeHyperparams {
    /// `alpha_mu = 1`, `alpha_w = n + alpha_mu + 1`,
    /// `t = alpha_mu (alpha_w - n - 1) / (alpha_mu + 1)`, `nu = 0`.
    pub fn defaults(n: usize) -> Self {
        let alpha_mu = 1.0;
        let alpha_w = n as f64 + alpha_mu + 1.0;
        let t = alpha_mu * (alpha_w - n as f64 - 1.0) / (alpha_mu + 1.0);
        Self { alpha_mu, alpha_w, nu: vec![0.0; n], t }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidHyperparameters(m));
        if !(self.alpha_mu > 0.0 && self.alpha_mu.is_finite()) {
            return bad(format!("alpha_mu must be positive, got {}", self.alpha_mu));
        }
        if !(self.alpha_w > n as f64 + 1.0 && self.alpha_w.is_finite()) {
            return bad(format!("alpha_w must exceed n + 1 = {}, got {}", n + 1, self.alpha_w));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return bad(format!("t must be positive, got {}", self.t));
        }
        if self.nu.len() != n || self.nu.iter().any(|v| !v.is_finite()) {
            return bad(format!("nu must hold {n} finite values"));
        }
        Ok(())
    }
}

/// Precomputed posterior scatter matrix `R` for one dataset; every subset
/// marginal is a closed form in the matching principal submatrix.
#[derive(Clone, Debug)]
pub struct BgeScorer {
    n: usize,
    n_rows: f64,
    hp: BgeHyperparams,
    /// Row-major `n x n`.
    r: Vec<f64>,
}

impl BgeScorer {
    /// All columns must be continuous.
    pub fn new(data: &Dataset, hp: &BgeHyperparams) -> Result<Self> {
        let n = data.n_cols();
        for col in data.columns() {
            if !col.kind.is_continuous() {
                return Err(Error::IncompatibleColumn {
                    column: col.name.clone(),
                    expected: "continuous",
                });
            }
        }
        if data.n_rows() == 0 {
            return Err(Error::InvalidDataset("BGe needs at least one row".into()));
        }
        hp.validate(n)?;
        let rows = data.n_rows() as f64;
        let means: Vec<f64> =
            data.columns().iter().map(|c| c.values.iter().sum::<f64>() / rows).collect();
        let shrink = rows * hp.alpha_mu / (rows + hp.alpha_mu);
        let mut r = vec![0.0; n * n];
        for i in 0..n {
            let xi = &data.column(i).values;
            for j in 0..=i {
                let xj = &data.column(j).values;
                let scatter: f64 =
                    xi.iter().zip(xj).map(|(a, b)| (a - means[i]) * (b - means[j])).sum();
                let mut v = scatter + shrink * (means[i] - hp.nu[i]) * (means[j] - hp.nu[j]);
                if i == j {
                    v += hp.t;
                }
                r[i * n + j] = v;
                r[j * n + i] = v;
            }
        }
        Ok(Self { n, n_rows: rows, hp: hp.clone(), r })
    }

    pub fn hyperparams(&self) -> &BgeHyperparams {
        &self.hp
    }

    /// `ln P(X_Y)` for the node subset `Y`; zero for the empty set.
    pub fn log_marginal(&self, subset: NodeSet) -> Result<f64> {
        if subset == 0 {
            return Ok(0.0);
        }
        let idx: Vec<usize> = members(subset).collect();
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.n) {
            return Err(Error::NodeOutOfRange { node: bad, node_count: self.n });
        }
        let l = idx.len();
        let lf = l as f64;
        let nn = self.n as f64;
        let big_n = self.n_rows;
        let (am, aw, t) = (self.hp.alpha_mu, self.hp.alpha_w, self.hp.t);
        let mut sub = vec![0.0; l * l];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                sub[a * l + b] = self.r[i * self.n + j];
            }
        }
        let ln_det = ln_det_spd(&sub, l).ok_or(Error::NotPositiveDefinite(subset))?;
        let prior_df = aw - nn + lf;
        let post_df = big_n + prior_df;
        Ok(0.5 * lf * (am / (big_n + am)).ln() + ln_multigamma(l, post_df / 2.0)
            - ln_multigamma(l, prior_df / 2.0)
            - 0.5 * lf * big_n * PI.ln()
            + 0.5 * prior_df * lf * t.ln()
            - 0.5 * post_df * ln_det)
    }
}

impl LocalScore for BgeScorer {
    fn node_count(&self) -> usize {
        self.n
    }

    fn local_score(&self, node: usize, parents: NodeSet) -> Result<f64> {
        check_family(node, parents, self.n)?;
        Ok(self.log_marginal(parents | bit(node))? - self.log_marginal(parents)?)
    }
}
