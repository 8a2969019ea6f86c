//! Exact enumeration oracles for small instances.

use crate::decoder::{is_failure, reconstruct};
use crate::distances::DistortionMeasure;
use crate::error::{Error, Result};
use crate::fragments::ShuffledInstance;
use crate::model::{FragmentConfig, SourceSpec, Symbol};

/// Cap on `|X|^(2l) |Y|^(2l)` for the transposition oracle.
pub const TRANSPOSITION_BUDGET: f64 = 1e8;
/// Cap on `|X|^N |Y|^N M!` decodes for the failure-probability oracle.
pub const EXACT_FP_BUDGET: f64 = 1e7;

/// Symbol vector with index `idx` in base `q`, most significant first.
fn unrank(mut idx: usize, q: usize, len: usize) -> Vec<Symbol> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (idx % q) as Symbol;
        idx /= q;
    }
    out
}

/// `P[E_12]`: two distinct IID fragments `x1 != x2` whose swapped pairing is at least
/// as likely as the true one, `P(y2|x1) P(y1|x2) >= P(y1|x1) P(y2|x2)`.
/// Ties count as errors; comparisons are in the log domain with a relative slack of 1e-9.
pub fn exact_transposition_probability(spec: &SourceSpec, l: usize) -> Result<f64> {
    if l == 0 {
        return Err(Error::OutOfRange("fragment length must be positive".into()));
    }
    let (qx, qy) = (spec.p_x().len(), spec.channel().outputs());
    let needed = (qx as f64).powi(2 * l as i32) * (qy as f64).powi(2 * l as i32);
    if needed > TRANSPOSITION_BUDGET {
        return Err(Error::BudgetExceeded {
            needed,
            budget: TRANSPOSITION_BUDGET,
        });
    }
    let nx = qx.pow(l as u32);
    let ny = qy.pow(l as u32);
    let log_ch = spec.channel().log_table();
    let xs: Vec<Vec<Symbol>> = (0..nx).map(|i| unrank(i, qx, l)).collect();
    let ys: Vec<Vec<Symbol>> = (0..ny).map(|i| unrank(i, qy, l)).collect();
    let log_px: Vec<f64> = xs
        .iter()
        .map(|x| x.iter().map(|&s| spec.p_x().get(s as usize).ln()).sum())
        .collect();
    // ll[a][b] = ln P(y_b | x_a)
    let ll: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| {
            ys.iter()
                .map(|y| {
                    x.iter()
                        .zip(y)
                        .map(|(&a, &b)| log_ch[a as usize * qy + b as usize])
                        .sum()
                })
                .collect()
        })
        .collect();

    let mut total = 0.0;
    for a in 0..nx {
        for b in 0..nx {
            if a == b {
                continue;
            }
            let prior = log_px[a] + log_px[b];
            let mut inner = 0.0;
            for y1 in 0..ny {
                let t1 = ll[a][y1];
                if t1 == f64::NEG_INFINITY {
                    continue;
                }
                for y2 in 0..ny {
                    let truth = t1 + ll[b][y2];
                    if truth == f64::NEG_INFINITY {
                        continue;
                    }
                    let swapped = ll[a][y2] + ll[b][y1];
                    if swapped >= truth - 1e-9 * (1.0 + truth.abs()) {
                        inner += truth.exp();
                    }
                }
            }
            total += prior.exp() * inner;
        }
    }
    Ok(total)
}

/// All permutations of `0..m` in lexicographic order.
pub fn all_permutations(m: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..m).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..m).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..m).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

/// Exact `FP(delta, xi)` by summing over every `(x^N, y^N)` and every shuffle,
/// running the decoder on each.
pub fn exact_fp_enumeration(
    spec: &SourceSpec,
    config: FragmentConfig,
    measure: &DistortionMeasure,
    delta: f64,
    xi: f64,
) -> Result<f64> {
    let n = config.n();
    let (qx, qy) = (spec.p_x().len(), spec.channel().outputs());
    let perms = all_permutations(config.m());
    let needed = (qx as f64).powi(n as i32) * (qy as f64).powi(n as i32) * perms.len() as f64;
    if needed > EXACT_FP_BUDGET {
        return Err(Error::BudgetExceeded {
            needed,
            budget: EXACT_FP_BUDGET,
        });
    }
    let perm_weight = 1.0 / perms.len() as f64;
    let mut fp = 0.0;
    for xi_idx in 0..qx.pow(n as u32) {
        let x = unrank(xi_idx, qx, n);
        let px: f64 = x.iter().map(|&s| spec.p_x().get(s as usize)).product();
        for yi_idx in 0..qy.pow(n as u32) {
            let y = unrank(yi_idx, qy, n);
            let pyx: f64 = x
                .iter()
                .zip(&y)
                .map(|(&a, &b)| spec.channel().prob(a as usize, b as usize))
                .product();
            let p = px * pyx;
            if p == 0.0 {
                continue;
            }
            for perm in &perms {
                let inst = ShuffledInstance::from_parts(x.clone(), y.clone(), perm.clone(), config)?;
                let recon = reconstruct(&inst, spec, measure, delta)?;
                if is_failure(&recon, xi) {
                    fp += p * perm_weight;
                }
            }
        }
    }
    Ok(fp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChannelKernel, Pmf};

    fn bsc(a: f64) -> SourceSpec {
        SourceSpec::new(Pmf::uniform(2).unwrap(), ChannelKernel::bsc(a).unwrap()).unwrap()
    }

    #[test]
    fn transposition_single_symbol() {
        // x1 != x2 has probability 1/2. Given x = (0, 1), the swap ties or wins unless
        // y = (0, 1): 1 - 0.81 = 0.19.
        let v = exact_transposition_probability(&bsc(0.1), 1).unwrap();
        assert!((v - 0.095).abs() < 1e-15);
    }

    #[test]
    fn clean_channel_has_no_transpositions() {
        let spec = SourceSpec::new(Pmf::uniform(2).unwrap(), ChannelKernel::identity(2).unwrap()).unwrap();
        for l in 1..=4 {
            assert_eq!(exact_transposition_probability(&spec, l).unwrap(), 0.0);
        }
    }

    #[test]
    fn budget_guards() {
        assert!(matches!(
            exact_transposition_probability(&bsc(0.1), 14),
            Err(Error::BudgetExceeded { .. })
        ));
        let cfg = FragmentConfig::from_length(3, 4).unwrap();
        assert!(exact_fp_enumeration(&bsc(0.1), cfg, &DistortionMeasure::hamming(2), 0.0, 0.0).is_err());
    }

    #[test]
    fn permutations_are_complete() {
        let p = all_permutations(4);
        assert_eq!(p.len(), 24);
        assert_eq!(p[0], vec![0, 1, 2, 3]);
        assert_eq!(p[23], vec![3, 2, 1, 0]);
        assert_eq!(all_permutations(1), vec![vec![0]]);
    }

    #[test]
    fn exact_fp_single_symbol_fragments() {
        // M = 2, L = 1: failure needs x1 != x2 and the decoder to pick the swap. With
        // ties broken toward the lowest index this depends on the shuffle, so the
        // value sits between P[swap strictly better] and P[swap at least as good].
        let fp = exact_fp_enumeration(
            &bsc(0.1),
            FragmentConfig::from_length(2, 1).unwrap(),
            &DistortionMeasure::hamming(2),
            0.0,
            0.0,
        )
        .unwrap();
        let strict = 0.5 * 0.01;
        let weak = exact_transposition_probability(&bsc(0.1), 1).unwrap();
        assert!(fp >= strict - 1e-15 && fp <= weak + 1e-15, "{fp}");
    }
}
