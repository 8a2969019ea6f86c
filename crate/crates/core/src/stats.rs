//! Binomial confidence intervals and helpers for comparing estimates across cells.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

fn check(k: u64, n: u64, confidence: f64) -> Result<()> {
    if n == 0 || k > n {
        return Err(Error::OutOfRange(format!(
            "need 0 <= k <= n and n > 0, got k={k} n={n}"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::OutOfRange(format!("confidence {confidence} not in (0,1)")));
    }
    Ok(())
}

/// Quantile of Beta(a, b) by bisection on the regularized incomplete beta function.
pub fn beta_quantile(p: f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta_reg(a, b, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Exact (Clopper-Pearson) interval for `k` successes out of `n`.
pub fn clopper_pearson(k: u64, n: u64, confidence: f64) -> Result<Interval> {
    check(k, n, confidence)?;
    let tail = (1.0 - confidence) / 2.0;
    let (kf, nf) = (k as f64, n as f64);
    let lo = if k == 0 {
        0.0
    } else {
        beta_quantile(tail, kf, nf - kf + 1.0)
    };
    let hi = if k == n {
        1.0
    } else {
        beta_quantile(1.0 - tail, kf + 1.0, nf - kf)
    };
    Ok(Interval { lo, hi })
}

/// Approximate 95% upper bound `3/n` when no events were observed.
pub fn rule_of_three(n: u64) -> f64 {
    if n == 0 {
        1.0
    } else {
        (3.0 / n as f64).min(1.0)
    }
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Wald interval `p_hat +- z sqrt(p_hat (1 - p_hat) / n)`, clipped to `[0, 1]`.
pub fn normal_interval(k: u64, n: u64, confidence: f64) -> Result<Interval> {
    check(k, n, confidence)?;
    let z = normal_quantile(0.5 + confidence / 2.0);
    let p = k as f64 / n as f64;
    let half = z * (p * (1.0 - p) / n as f64).sqrt();
    Ok(Interval {
        lo: (p - half).max(0.0),
        hi: (p + half).min(1.0),
    })
}

/// Each interval lies entirely below the previous one.
pub fn strictly_ci_decreasing(intervals: &[Interval]) -> bool {
    intervals.windows(2).all(|w| w[1].hi < w[0].lo)
}

/// Each point estimate is no larger than the previous interval's upper end.
pub fn ci_non_increasing(estimates: &[f64], intervals: &[Interval]) -> bool {
    estimates.len() == intervals.len() && (1..estimates.len()).all(|i| estimates[i] <= intervals[i - 1].hi)
}
