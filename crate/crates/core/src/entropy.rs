//! Entropies and divergences, all in nats.

use crate::error::{Error, Result};
use crate::model::Pmf;

/// `-sum p ln p` with `0 ln 0 = 0`.
pub fn shannon_entropy(p: &Pmf) -> f64 {
    entropy_of(p.probs())
}

pub(crate) fn entropy_of(probs: &[f64]) -> f64 {
    -probs.iter().filter(|v| **v > 0.0).map(|v| v * v.ln()).sum::<f64>()
}

/// Rényi entropy of order `alpha >= 0`, `alpha != 1`.
pub fn renyi_entropy(p: &Pmf, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::OutOfRange(format!(
            "renyi order {alpha} must be a finite non-negative number"
        )));
    }
    if alpha == 1.0 {
        return Err(Error::OutOfRange(
            "renyi order 1 is the Shannon entropy; use shannon_entropy".into(),
        ));
    }
    let s: f64 = p.probs().iter().filter(|v| **v > 0.0).map(|v| v.powf(alpha)).sum();
    Ok(s.ln() / (1.0 - alpha))
}

/// Collision entropy `H_2 = -ln sum p^2`.
pub fn collision_entropy(p: &Pmf) -> f64 {
    -p.probs().iter().map(|v| v * v).sum::<f64>().ln()
}

pub fn binary_entropy(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    -t * t.ln() - (1.0 - t) * (1.0 - t).ln()
}

/// Bernoulli parameter `p <= 1/2` whose binary entropy equals `h` nats.
pub fn bernoulli_with_entropy(h: f64) -> Result<f64> {
    let max = std::f64::consts::LN_2;
    if !(h > 0.0 && h <= max) {
        return Err(Error::OutOfRange(format!("binary entropy {h} not in (0, ln 2]")));
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `D(p || q)`; infinite when `p` is not absolutely continuous w.r.t. `q`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| if *b > 0.0 { a * (a / b).ln() } else { f64::INFINITY })
        .sum()
}

/// Entropy of the empirical distribution `counts / total`.
pub fn entropy_of_counts<I: IntoIterator<Item = usize>>(counts: I, total: usize) -> f64 {
    let n = total as f64;
    -counts
        .into_iter()
        .filter(|c| *c > 0)
        .map(|c| {
            let f = c as f64 / n;
            f * f.ln()
        })
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shannon_examples() {
        let u = Pmf::uniform(2).unwrap();
        assert!((shannon_entropy(&u) - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(shannon_entropy(&Pmf::new(vec![0.0, 1.0, 0.0]).unwrap()), 0.0);
        let p = Pmf::new(vec![0.9, 0.1]).unwrap();
        let oracle = -(0.9f64 * 0.9f64.ln()) - 0.1f64 * 0.1f64.ln();
        assert!((shannon_entropy(&p) - oracle).abs() < 1e-12);
    }

    #[test]
    fn renyi_examples() {
        let u = Pmf::uniform(2).unwrap();
        assert!((renyi_entropy(&u, 2.0).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        let p = Pmf::new(vec![0.9, 0.1]).unwrap();
        let h2 = renyi_entropy(&p, 2.0).unwrap();
        assert!((h2 - 0.198451).abs() < 1e-6);
        assert!((h2 - collision_entropy(&p)).abs() < 1e-15);
        assert!(renyi_entropy(&p, 1.0).is_err());
        assert!(renyi_entropy(&p, -0.5).is_err());
    }

    #[test]
    fn collision_probability_matches_pair_enumeration() {
        let p = Pmf::new(vec![0.5, 0.2, 0.3]).unwrap();
        let mut collide = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                if a == b {
                    collide += p.get(a) * p.get(b);
                }
            }
        }
        let h2 = renyi_entropy(&p, 2.0).unwrap();
        assert!(((-h2).exp() - collide).abs() < 1e-15);
    }

    #[test]
    fn bernoulli_entropy_inverse() {
        let p = bernoulli_with_entropy(0.3).unwrap();
        assert!((binary_entropy(p) - 0.3).abs() < 1e-14);
        assert!((p - 0.0889062694591).abs() < 1e-10);
        assert!(bernoulli_with_entropy(0.8).is_err());
    }

    #[test]
    fn kl_basics() {
        assert_eq!(kl_divergence(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert!(kl_divergence(&[0.5, 0.5], &[1.0, 0.0]).is_infinite());
        assert!(kl_divergence(&[0.2, 0.8], &[0.5, 0.5]) > 0.0);
    }
}
