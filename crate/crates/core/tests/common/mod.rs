//! Independent reference computations used by the integration tests. Nothing here
//! calls into the library's numerical routines; only its constructors.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reforder::model::{ChannelKernel, Pmf, SourceSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random PMF with every entry at least `floor / n`.
pub fn random_probs(r: &mut ChaCha8Rng, n: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| floor / n as f64 + r.random::<f64>()).collect();
    let s: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|v| v / s).collect();
    // Put the rounding residue on the largest entry.
    let resid = 1.0 - p.iter().sum::<f64>();
    let imax = (0..n).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
    p[imax] += resid;
    p
}

pub struct RandomSource {
    pub p: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub spec: SourceSpec,
}

pub fn random_source(r: &mut ChaCha8Rng, nx: usize, ny: usize) -> RandomSource {
    let p = random_probs(r, nx, 0.05);
    let rows: Vec<Vec<f64>> = (0..nx).map(|_| random_probs(r, ny, 0.0)).collect();
    let spec = SourceSpec::new(Pmf::new(p.clone()).unwrap(), ChannelKernel::new(rows.clone()).unwrap()).unwrap();
    RandomSource { p, rows, spec }
}

/// Bhattacharyya coefficient of two rows.
pub fn bc(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x * y).sqrt()).sum()
}

/// `-1/2 ln sum_{x1,x2} P(x1) P(x2) BC(x1,x2)^2`.
pub fn psi2_direct(p: &[f64], rows: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for i in 0..p.len() {
        for j in 0..p.len() {
            let c = if i == j { 1.0 } else { bc(&rows[i], &rows[j]) };
            s += p[i] * p[j] * c * c;
        }
    }
    -0.5 * s.ln()
}

/// `trace(a^k)` with `a[i][j] = sqrt(P_i P_j) BC(i, j)`, by repeated multiplication.
pub fn trace_power_direct(p: &[f64], rows: &[Vec<f64>], k: usize) -> f64 {
    let n = p.len();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (p[i] * p[j]).sqrt() * if i == j { 1.0 } else { bc(&rows[i], &rows[j]) })
                .collect()
        })
        .collect();
    let mut acc = a.clone();
    for _ in 1..k {
        let mut next = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).map(|t| acc[i][t] * a[t][j]).sum();
            }
        }
        acc = next;
    }
    (0..n).map(|i| acc[i][i]).sum()
}

/// `d*(delta)` through the dual of the two-constraint LP:
/// `max_{lambda >= 0} lambda delta + min_i (c_i - lambda D_i)`, searched on a grid
/// of step 0.002 in `theta = atan(lambda)` and refined by golden section.
pub fn d_star_dual(costs: &[f64], dists: &[f64], delta: f64) -> f64 {
    let f = |theta: f64| {
        let lambda = theta.tan();
        let inner = costs
            .iter()
            .zip(dists)
            .filter(|(c, _)| c.is_finite())
            .map(|(c, d)| c - lambda * d)
            .fold(f64::INFINITY, f64::min);
        lambda * delta + inner
    };
    let top = std::f64::consts::FRAC_PI_2 - 1e-9;
    let mut best = (0.0, f(0.0));
    let mut t = 0.0;
    while t < top {
        let v = f(t);
        if v > best.1 {
            best = (t, v);
        }
        t += 0.002;
    }
    let (mut lo, mut hi) = ((best.0 - 0.002).max(0.0), (best.0 + 0.002).min(top));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    best.1.max(f(0.5 * (lo + hi)))
}

/// Maximum of `sum_j w[pi(j)][j]` over all permutations, by recursion.
pub fn brute_force_assignment(w: &[Vec<f64>]) -> f64 {
    fn go(w: &[Vec<f64>], j: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        let m = w.len();
        if j == m {
            if acc > *best {
                *best = acc;
            }
            return;
        }
        for i in 0..m {
            if !used[i] {
                used[i] = true;
                go(w, j + 1, used, acc + w[i][j], best);
                used[i] = false;
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    go(w, 0, &mut vec![false; w.len()], 0.0, &mut best);
    best
}

/// `1/2 [ln 2 - ln(1 + 4 a (1 - a))]`: uniform binary source through BSC(a).
pub fn bsc_uniform_psi2(a: f64) -> f64 {
    0.5 * (2f64.ln() - (1.0 + 4.0 * a * (1.0 - a)).ln())
}

/// Bhattacharyya distance between distinct inputs of a q-ary symmetric channel.
pub fn symmetric_distance(a: f64, q: usize) -> f64 {
    let qm = (q - 1) as f64;
    -((4.0 * (1.0 - a) * a / qm).sqrt() + (q as f64 - 2.0) * a / qm).ln()
}

/// Transposition probability by direct enumeration in the probability domain,
/// for a uniform binary source and BSC(a).
pub fn transposition_bsc_direct(a: f64, l: usize) -> f64 {
    let n = 1usize << l;
    let lik = |x: usize, y: usize| {
        let flips = (x ^ y).count_ones() as i32;
        a.powi(flips) * (1.0 - a).powi(l as i32 - flips)
    };
    let px = 1.0 / n as f64;
    let mut total = 0.0;
    for x1 in 0..n {
        for x2 in 0..n {
            if x1 == x2 {
                continue;
            }
            for y1 in 0..n {
                for y2 in 0..n {
                    let truth = lik(x1, y1) * lik(x2, y2);
                    let swap = lik(x1, y2) * lik(x2, y1);
                    // Products of the same factors in different order: compare with slack.
                    if swap >= truth * (1.0 - 1e-12) {
                        total += px * px * truth;
                    }
                }
            }
        }
    }
    total
}

/// For two fragments of length `l` of a uniform binary source through BSC(a), the
/// probability that the fragments differ and the swapped pairing is strictly more likely.
pub fn strict_swap_bsc(a: f64, l: usize) -> f64 {
    let n = 1usize << l;
    let lik = |x: usize, y: usize| {
        let flips = (x ^ y).count_ones() as i32;
        a.powi(flips) * (1.0 - a).powi(l as i32 - flips)
    };
    let px = 1.0 / n as f64;
    let mut total = 0.0;
    for x1 in 0..n {
        for x2 in 0..n {
            if x1 == x2 {
                continue;
            }
            for y1 in 0..n {
                for y2 in 0..n {
                    let truth = lik(x1, y1) * lik(x2, y2);
                    if lik(x1, y2) * lik(x2, y1) > truth * (1.0 + 1e-12) {
                        total += px * px * truth;
                    }
                }
            }
        }
    }
    total
}
