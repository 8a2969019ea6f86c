//! Entropic mirror descent for the pair rate function
//! `min_Q 1/2 KL(Q || P_X x P_X) + sum_Q d`, used as an independent check of the
//! closed form.

use serde::{Deserialize, Serialize};

use super::psi::bhattacharyya;
use crate::error::{Error, Result};
use crate::model::SourceSpec;

pub const MAX_ITERATIONS: usize = 100_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Psi2OracleSolution {
    pub value: f64,
    /// Minimizer over `X x X`, row-major.
    pub q: Vec<f64>,
    pub iterations: usize,
    /// Q-weighted variance of `ln Q - ln (P x P e^{-2d})` at exit.
    pub kkt_residual: f64,
}

/// Normalized Gibbs target `P(x1) P(x2) exp(-2 d(x1, x2)) / Z`.
pub fn gibbs_target(spec: &SourceSpec) -> Vec<f64> {
    let table = bhattacharyya(spec);
    let p = spec.p_x().probs();
    let n = p.len();
    let w: Vec<f64> = (0..n * n)
        .map(|i| p[i / n] * p[i % n] * (-2.0 * table.get(i / n, i % n)).exp())
        .collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

/// Multiplicative updates `Q <- Q exp(-eta grad) / Z` with `eta = 0.5 / (1 + max finite d)`.
/// Pairs at infinite distance carry zero Gibbs weight and are excluded from the support.
pub fn psi2_optimizer_oracle(spec: &SourceSpec, tol: f64) -> Result<Psi2OracleSolution> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange(format!("tolerance {tol} must be positive")));
    }
    let table = bhattacharyya(spec);
    let p = spec.p_x().probs();
    let n = p.len();
    let support: Vec<usize> = (0..n * n).filter(|i| table.get(i / n, i % n).is_finite()).collect();
    let log_pp: Vec<f64> = support.iter().map(|&i| (p[i / n] * p[i % n]).ln()).collect();
    let d: Vec<f64> = support.iter().map(|&i| table.get(i / n, i % n)).collect();
    let eta = 0.5 / (1.0 + table.max_finite());

    // Start from the product measure restricted to the support.
    let mut log_q = log_pp.clone();
    normalize_log(&mut log_q);

    let objective = |log_q: &[f64]| -> f64 {
        log_q
            .iter()
            .zip(&log_pp)
            .zip(&d)
            .map(|((lq, lp), dd)| lq.exp() * (0.5 * (lq - lp) + dd))
            .sum()
    };
    let residual = |log_q: &[f64]| -> f64 {
        let r: Vec<f64> = log_q
            .iter()
            .zip(&log_pp)
            .zip(&d)
            .map(|((lq, lp), dd)| lq - (lp - 2.0 * dd))
            .collect();
        let mean: f64 = log_q.iter().zip(&r).map(|(lq, ri)| lq.exp() * ri).sum();
        log_q
            .iter()
            .zip(&r)
            .map(|(lq, ri)| lq.exp() * (ri - mean).powi(2))
            .sum()
    };

    let mut value = objective(&log_q);
    let mut last_change = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        for ((lq, lp), dd) in log_q.iter_mut().zip(&log_pp).zip(&d) {
            let grad = 0.5 * (*lq - lp + 1.0) + dd;
            *lq -= eta * grad;
        }
        normalize_log(&mut log_q);
        let next = objective(&log_q);
        last_change = (next - value).abs();
        value = next;
        let kkt = residual(&log_q);
        if last_change < tol && kkt < tol {
            let mut q = vec![0.0; n * n];
            for (slot, lq) in support.iter().zip(&log_q) {
                q[*slot] = lq.exp();
            }
            return Ok(Psi2OracleSolution {
                value,
                q,
                iterations: it,
                kkt_residual: kkt,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        last_change,
    })
}

fn normalize_log(log_q: &mut [f64]) {
    let max = log_q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = log_q.iter().map(|v| (v - max).exp()).sum();
    let shift = max + z.ln();
    for v in log_q.iter_mut() {
        *v -= shift;
    }
}

/// Row and column marginals of a row-major joint PMF on `n x n`.
pub fn marginals(q: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rows = vec![0.0; n];
    let mut cols = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            rows[i] += q[i * n + j];
            cols[j] += q[i * n + j];
        }
    }
    (rows, cols)
}
