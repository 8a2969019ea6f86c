//! Maximum-likelihood reordering as a maximum-weight perfect matching between
//! shuffled fragments and slots of the reference sequence.

use serde::{Deserialize, Serialize};

use crate::distances::{fragment_distortion, DistortionMeasure};
use crate::error::{Error, Result};
use crate::fragments::ShuffledInstance;
use crate::io::ExtF64;
use crate::model::SourceSpec;

/// `w[i][j] = ln P(y slot j | x fragment i)`; `-inf` marks an impossible pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    m: usize,
    w: Vec<f64>,
}

impl WeightMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        let mut w = Vec::with_capacity(m * m);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != m {
                return Err(Error::Dimension(format!(
                    "weight row {i} has {} entries, expected {m}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| v.is_nan() || **v == f64::INFINITY) {
                return Err(Error::OutOfRange(format!("weight row {i} contains {v}")));
            }
            w.extend(row);
        }
        Ok(WeightMatrix { m, w })
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.m + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.w.chunks(self.m.max(1)).map(|r| r.to_vec()).collect()
    }

    /// `sum_j w[slot_to_fragment[j]][j]`.
    pub fn value(&self, slot_to_fragment: &[usize]) -> f64 {
        slot_to_fragment.iter().enumerate().map(|(j, &i)| self.get(i, j)).sum()
    }
}

pub fn build_weights(instance: &ShuffledInstance, spec: &SourceSpec) -> WeightMatrix {
    let ny = spec.channel().outputs();
    let log = spec.channel().log_table();
    let m = instance.m();
    let mut w = vec![0.0; m * m];
    for (i, frag) in instance.fragments.iter().enumerate() {
        for j in 0..m {
            w[i * m + j] = frag
                .iter()
                .zip(instance.y_fragment(j))
                .map(|(&x, &y)| log[x as usize * ny + y as usize])
                .sum();
        }
    }
    WeightMatrix { m, w }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    /// Fragment placed in each slot.
    pub slot_to_fragment: Vec<usize>,
    pub value: f64,
}

/// Shortest augmenting path with potentials on the costs `-w`, `O(M^3)`.
/// Scans break ties toward the lowest index.
pub fn solve_assignment(w: &WeightMatrix) -> Result<Assignment> {
    let n = w.size();
    if n == 0 {
        return Ok(Assignment {
            slot_to_fragment: Vec::new(),
            value: 0.0,
        });
    }
    let cost = |i: usize, j: usize| -w.get(i - 1, j - 1);
    // 1-based: rows are fragments, columns are slots; p[j] is the row matched to column j.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if delta == f64::INFINITY {
                return Err(Error::Infeasible);
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let slot_to_fragment: Vec<usize> = (1..=n).map(|j| p[j] - 1).collect();
    let value = w.value(&slot_to_fragment);
    Ok(Assignment {
        slot_to_fragment,
        value,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    /// Shuffled fragment index to slot.
    pub assignment: Vec<usize>,
    pub x_hat: Vec<u8>,
    pub per_fragment_distortion: Vec<f64>,
    pub xi_delta: f64,
    pub log_likelihood: f64,
}

/// Fragment failure rule: `Delta >= delta`, or `Delta > 0` when `delta = 0`.
pub fn fragment_fails(distortion: f64, delta: f64) -> bool {
    if delta > 0.0 {
        distortion >= delta
    } else {
        distortion > 0.0
    }
}

pub fn reconstruct_with(
    instance: &ShuffledInstance,
    weights: &WeightMatrix,
    measure: &DistortionMeasure,
    delta: f64,
) -> Result<Reconstruction> {
    if !(delta >= 0.0) {
        return Err(Error::OutOfRange(format!("delta {delta} must be non-negative")));
    }
    let sol = solve_assignment(weights)?;
    let m = instance.m();
    let mut assignment = vec![0; m];
    let mut x_hat = Vec::with_capacity(instance.config.n());
    let mut per_fragment_distortion = Vec::with_capacity(m);
    for (slot, &frag) in sol.slot_to_fragment.iter().enumerate() {
        assignment[frag] = slot;
        let decoded = &instance.fragments[frag];
        x_hat.extend_from_slice(decoded);
        per_fragment_distortion.push(fragment_distortion(measure, instance.x_fragment(slot), decoded)?);
    }
    let failures = per_fragment_distortion
        .iter()
        .filter(|&&d| fragment_fails(d, delta))
        .count();
    Ok(Reconstruction {
        assignment,
        x_hat,
        per_fragment_distortion,
        xi_delta: failures as f64 / m as f64,
        log_likelihood: sol.value,
    })
}

pub fn reconstruct(
    instance: &ShuffledInstance,
    spec: &SourceSpec,
    measure: &DistortionMeasure,
    delta: f64,
) -> Result<Reconstruction> {
    reconstruct_with(instance, &build_weights(instance, spec), measure, delta)
}

/// Trial failure rule: `Xi >= xi`, or `Xi > 0` when `xi = 0`.
pub fn is_failure(recon: &Reconstruction, xi: f64) -> bool {
    if xi > 0.0 {
        recon.xi_delta >= xi
    } else {
        recon.xi_delta > 0.0
    }
}

/// Everything about one decoded trial, for debugging dumps.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecodedTrial {
    pub seed: u64,
    pub stream: u64,
    pub m: usize,
    pub l: usize,
    pub delta: f64,
    pub xi: f64,
    pub x_seq: Vec<u8>,
    pub y_seq: Vec<u8>,
    pub hidden_perm: Vec<usize>,
    pub weights: Vec<Vec<ExtF64>>,
    pub reconstruction: Reconstruction,
    pub true_log_likelihood: ExtF64,
    pub failure: bool,
}

impl DecodedTrial {
    pub fn new(
        instance: &ShuffledInstance,
        weights: &WeightMatrix,
        reconstruction: Reconstruction,
        (seed, stream): (u64, u64),
        (delta, xi): (f64, f64),
    ) -> Self {
        // The true assignment puts shuffled fragment s into slot hidden_perm[s].
        let mut truth = vec![0; instance.m()];
        for (s, &t) in instance.hidden_perm.iter().enumerate() {
            truth[t] = s;
        }
        DecodedTrial {
            seed,
            stream,
            m: instance.m(),
            l: instance.l(),
            delta,
            xi,
            x_seq: instance.x_seq.clone(),
            y_seq: instance.y_seq.clone(),
            hidden_perm: instance.hidden_perm.clone(),
            weights: weights
                .rows()
                .into_iter()
                .map(|r| r.into_iter().map(ExtF64).collect())
                .collect(),
            true_log_likelihood: ExtF64(weights.value(&truth)),
            failure: is_failure(&reconstruction, xi),
            reconstruction,
        }
    }
}
