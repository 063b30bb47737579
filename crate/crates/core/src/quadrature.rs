//! Quadrature against the standard normal density.
//!
//! Both half-line integrals `∫₀^∞ φ(x) g(x) dx` and full-line expectations
//! `E[f(Z)]` use composite Gauss–Legendre panels on `[0, HALF_LINE_CUTOFF]`,
//! the latter by folding `f(x) + f(-x)`. Panels converge geometrically for
//! integrands analytic near the real axis, such as a steep logistic.

use crate::numeric::std_normal_pdf;
use std::f64::consts::PI;

/// φ(12) ≈ 5e-32, far below any tolerance used here.
pub const HALF_LINE_CUTOFF: f64 = 12.0;

const LEGENDRE_ORDER: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    /// Number of 32-point Gauss–Legendre panels on `[0, HALF_LINE_CUTOFF]`.
    pub panels: usize,
    /// Absolute accuracy the rules are expected to reach.
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { panels: 48, tolerance: 1e-10 }
    }
}

impl QuadratureConfig {
    /// The same configuration with the node count doubled.
    pub fn refined(&self) -> Self {
        Self { panels: self.panels * 2, tolerance: self.tolerance }
    }
}

#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "need at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    Rule { nodes: x, weights: w }
}

/// Precomputed rule for one [`QuadratureConfig`].
#[derive(Clone, Debug)]
pub struct Quadrature {
    config: QuadratureConfig,
    /// Absolute nodes on the half line and weights including `φ(x)`.
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    pub fn new(config: QuadratureConfig) -> Self {
        let legendre = gauss_legendre(LEGENDRE_ORDER);
        let panels = config.panels.max(1);
        let half = 0.5 * HALF_LINE_CUTOFF / panels as f64;
        let mut nodes = Vec::with_capacity(panels * LEGENDRE_ORDER);
        let mut weights = Vec::with_capacity(panels * LEGENDRE_ORDER);
        for p in 0..panels {
            let mid = (2 * p + 1) as f64 * half;
            for (&t, &w) in legendre.nodes.iter().zip(&legendre.weights) {
                let x = mid + half * t;
                nodes.push(x);
                weights.push(half * w * std_normal_pdf(x));
            }
        }
        Self { config, nodes, weights }
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.config
    }

    /// `E[f(Z)]` for `Z ~ N(0, 1)`.
    pub fn normal_expectation<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.half_line_normal(|x| f(x) + f(-x))
    }

    /// `∫₀^∞ φ(x) g(x) dx`.
    pub fn half_line_normal<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

impl Default for Quadrature {
    fn default() -> Self {
        Self::new(QuadratureConfig::default())
    }
}
