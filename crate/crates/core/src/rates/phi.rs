//! Cycle-broken relaxation `phi_K` of the cycle rate function.
//!
//! `phi_K = min over Q on X x X with equal marginals mu of
//!   (1/K) KL(mu || P) + ((K-1)/K) KL(Q_{2|1} || P | mu) + sum_Q d`.
//!
//! For a fixed marginal `mu` the conditional term equals `KL(Q || mu x P)`, and with
//! both marginals pinned to `mu` the inner problem is an entropic transport problem
//! with cost `d / w` (solved by Sinkhorn scaling). The outer problem over `mu` is
//! convex and low-dimensional (`|X| <= 3`): grid search, then compass refinement.

use super::psi::bhattacharyya;
use crate::distances::SymbolDistanceTable;
use crate::entropy::kl_divergence;
use crate::error::{Error, Result};
use crate::model::SourceSpec;

pub const MAX_GRID_STEP: f64 = 0.01;
pub const MAX_ALPHABET: usize = 3;

const SINKHORN_TOL: f64 = 1e-14;
const SINKHORN_MAX_ITER: usize = 20_000;

#[derive(Clone, Debug)]
pub struct PhiSolution {
    pub value: f64,
    pub marginal: Vec<f64>,
    pub q: Vec<f64>,
}

/// `phi_K` for `K >= 4`.
pub fn phi_k_reduced(spec: &SourceSpec, k: usize, grid_step: f64) -> Result<f64> {
    if k < 4 {
        return Err(Error::OutOfRange(format!("phi_K is defined here for K >= 4, got {k}")));
    }
    let kf = k as f64;
    Ok(phi_weighted(spec, 1.0 / kf, (kf - 1.0) / kf, grid_step)?.value)
}

/// The `K -> infinity` limit: `min KL(Q_{2|1} || P | mu) + sum_Q d` over equal-marginal `Q`.
pub fn phi_limit(spec: &SourceSpec, grid_step: f64) -> Result<f64> {
    Ok(phi_weighted(spec, 0.0, 1.0, grid_step)?.value)
}

/// Minimizes `w_marg KL(mu || P) + w_cond KL(Q || mu x P) + sum_Q d` over
/// equal-marginal joint PMFs `Q` with marginal `mu`.
pub fn phi_weighted(spec: &SourceSpec, w_marg: f64, w_cond: f64, grid_step: f64) -> Result<PhiSolution> {
    let n = spec.p_x().len();
    if n > MAX_ALPHABET {
        return Err(Error::OutOfRange(format!(
            "grid search supports |X| <= {MAX_ALPHABET}, got {n}"
        )));
    }
    if !(grid_step > 0.0 && grid_step <= MAX_GRID_STEP) {
        return Err(Error::OutOfRange(format!(
            "grid step {grid_step} must be in (0, {MAX_GRID_STEP}]"
        )));
    }
    if !(w_cond > 0.0) || w_marg < 0.0 {
        return Err(Error::OutOfRange("weights must satisfy w_cond > 0, w_marg >= 0".into()));
    }
    let table = bhattacharyya(spec);
    let p = spec.p_x().probs().to_vec();
    let eval = |mu: &[f64]| inner(&table, &p, mu, w_marg, w_cond);

    if n == 1 {
        let (value, q) = eval(&[1.0]);
        return Ok(PhiSolution {
            value,
            marginal: vec![1.0],
            q,
        });
    }

    // Interior grid over the marginal simplex.
    let steps = (1.0 / grid_step).round() as usize;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |mu: Vec<f64>| {
        let (v, _) = eval(&mu);
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, mu));
        }
    };
    match n {
        2 => {
            for i in 1..steps {
                let a = i as f64 / steps as f64;
                consider(vec![a, 1.0 - a]);
            }
        }
        _ => {
            for i in 1..steps {
                for j in 1..(steps - i) {
                    let a = i as f64 / steps as f64;
                    let b = j as f64 / steps as f64;
                    consider(vec![a, b, 1.0 - a - b]);
                }
            }
        }
    }
    let (mut value, mut mu) = best.ok_or_else(|| Error::OutOfRange("grid has no interior point".into()))?;

    // Compass refinement along simplex edge directions e_i - e_j.
    let mut h = grid_step;
    while h > 1e-12 {
        let mut improved = false;
        for i in 0..n {
            for j in 0..n {
                if i == j || mu[j] - h <= 0.0 {
                    continue;
                }
                let mut cand = mu.clone();
                cand[i] += h;
                cand[j] -= h;
                let (v, _) = eval(&cand);
                if v < value {
                    value = v;
                    mu = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    let (value, q) = eval(&mu);
    Ok(PhiSolution { value, marginal: mu, q })
}

fn inner(table: &SymbolDistanceTable, p: &[f64], mu: &[f64], w_marg: f64, w_cond: f64) -> (f64, Vec<f64>) {
    let n = mu.len();
    let kernel: Vec<f64> = table.entries().iter().map(|d| (-d / w_cond).exp()).collect();
    let q = sinkhorn(&kernel, mu, n);
    let mut neg_ent = 0.0;
    let mut dist = 0.0;
    for (idx, qi) in q.iter().enumerate() {
        if *qi > 0.0 {
            neg_ent += qi * qi.ln();
            dist += qi * table.entries()[idx];
        }
    }
    // KL(Q || mu x P) = sum Q ln Q - sum mu ln mu - sum mu ln P, using Q's marginals = mu.
    let cross: f64 = mu
        .iter()
        .zip(p)
        .filter(|(m, _)| **m > 0.0)
        .map(|(m, pi)| m * m.ln() + m * pi.ln())
        .sum();
    let cond = neg_ent - cross;
    let value = w_marg * kl_divergence(mu, p) + w_cond * cond + dist;
    (value, q)
}

/// Scales `kernel` to a joint PMF with both marginals equal to `mu`.
fn sinkhorn(kernel: &[f64], mu: &[f64], n: usize) -> Vec<f64> {
    let mut u = vec![1.0; n];
    let mut v = vec![1.0; n];
    let build = |u: &[f64], v: &[f64]| -> Vec<f64> { (0..n * n).map(|i| u[i / n] * kernel[i] * v[i % n]).collect() };
    for _ in 0..SINKHORN_MAX_ITER {
        for i in 0..n {
            let s: f64 = (0..n).map(|j| kernel[i * n + j] * v[j]).sum();
            u[i] = if s > 0.0 { mu[i] / s } else { 0.0 };
        }
        for j in 0..n {
            let s: f64 = (0..n).map(|i| kernel[i * n + j] * u[i]).sum();
            v[j] = if s > 0.0 { mu[j] / s } else { 0.0 };
        }
        let q = build(&u, &v);
        let err: f64 = (0..n)
            .map(|i| ((0..n).map(|j| q[i * n + j]).sum::<f64>() - mu[i]).abs())
            .sum();
        if err < SINKHORN_TOL {
            return q;
        }
    }
    build(&u, &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChannelKernel, Pmf};
    use crate::rates::psi2_closed_form;

    fn bsc_uniform() -> SourceSpec {
        SourceSpec::new(Pmf::uniform(2).unwrap(), ChannelKernel::bsc(0.1).unwrap()).unwrap()
    }

    #[test]
    fn phi4_dominates_psi2() {
        let spec = bsc_uniform();
        let phi4 = phi_k_reduced(&spec, 4, 0.01).unwrap();
        assert!(phi4 >= psi2_closed_form(&spec).unwrap() - 1e-9);
    }

    #[test]
    fn zero_distance_channel_gives_zero() {
        let spec = SourceSpec::new(Pmf::new(vec![0.3, 0.7]).unwrap(), ChannelKernel::uniform(2, 2).unwrap()).unwrap();
        let sol = phi_weighted(&spec, 0.25, 0.75, 0.01).unwrap();
        assert!(sol.value.abs() < 1e-9);
        for (m, p) in sol.marginal.iter().zip([0.3, 0.7]) {
            assert!((m - p).abs() < 1e-4);
        }
        let product = [0.09, 0.21, 0.21, 0.49];
        for (q, e) in sol.q.iter().zip(product) {
            assert!((q - e).abs() < 1e-4);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let spec = bsc_uniform();
        assert!(phi_k_reduced(&spec, 3, 0.01).is_err());
        assert!(phi_k_reduced(&spec, 4, 0.05).is_err());
        let big = SourceSpec::new(Pmf::uniform(4).unwrap(), ChannelKernel::symmetric(4, 4, 0.1).unwrap()).unwrap();
        assert!(phi_k_reduced(&big, 4, 0.01).is_err());
    }
}
