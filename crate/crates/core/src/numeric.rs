//! Log-domain helpers and special functions.

use std::f64::consts::{LN_2, PI, SQRT_2};

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln B(a, b)` for the two-argument beta function.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Log of the multivariate gamma function `Γ_p(a)`.
pub fn ln_multigamma(p: usize, a: f64) -> f64 {
    let pf = p as f64;
    let mut acc = pf * (pf - 1.0) / 4.0 * PI.ln();
    for j in 1..=p {
        acc += ln_gamma(a + (1.0 - j as f64) / 2.0);
    }
    acc
}

/// Numerically stable `ln Σ exp(x_i)`; `-inf` for an empty input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// `ln(exp(a) + exp(b))`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `x ln x` with the continuous extension `0 ln 0 = 0`.
pub fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

pub const LN_4: f64 = 2.0 * LN_2;

/// Cholesky log-determinant of a dense symmetric matrix given row-major.
/// Returns `None` when the matrix is not positive definite.
pub fn ln_det_spd(matrix: &[f64], dim: usize) -> Option<f64> {
    debug_assert_eq!(matrix.len(), dim * dim);
    let mut l = vec![0.0; dim * dim];
    let mut ln_det = 0.0;
    for i in 0..dim {
        for j in 0..=i {
            let mut s = matrix[i * dim + j];
            for k in 0..j {
                s -= l[i * dim + k] * l[j * dim + k];
            }
            if i == j {
                if !(s > 0.0) || !s.is_finite() {
                    return None;
                }
                let d = s.sqrt();
                l[i * dim + i] = d;
                ln_det += 2.0 * d.ln();
            } else {
                l[i * dim + j] = s / l[j * dim + j];
            }
        }
    }
    Some(ln_det)
}
