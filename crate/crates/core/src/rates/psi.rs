//! Cycle rate functions `psi_K` through the Bhattacharyya kernel.
//!
//! For a length-`K` cycle the expected Bhattacharyya factor is
//! `sum_{x in X^K} prod_j P(x_j) exp(-d(x_j, x_{j+1 mod K})) = trace(A^K)` with the
//! symmetric kernel `A(x, x') = sqrt(P(x) P(x')) exp(-d(x, x'))`, and
//! `psi_K = -(1/K) ln trace(A^K)`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::distances::{bhattacharyya_table, SymbolDistanceTable};
use crate::entropy::collision_entropy;
use crate::error::{Error, Result};
use crate::model::{ChannelKernel, Pmf, SourceSpec};

/// How a reported value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    ClosedForm,
    CollisionForm,
    Trace,
    CycleSum,
    Optimizer,
    Lp,
    Grid,
}

impl MethodTag {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodTag::ClosedForm => "closed_form",
            MethodTag::CollisionForm => "collision_form",
            MethodTag::Trace => "trace",
            MethodTag::CycleSum => "cycle_sum",
            MethodTag::Optimizer => "optimizer",
            MethodTag::Lp => "lp",
            MethodTag::Grid => "grid",
        }
    }
}

/// Budget for direct enumeration of `X^K` cycle sums.
pub const CYCLE_SUM_BUDGET: f64 = 1e6;

#[derive(Clone, Debug)]
pub struct BhattacharyyaKernel {
    n: usize,
    a: Vec<f64>,
}

impl BhattacharyyaKernel {
    pub fn new(spec: &SourceSpec) -> Self {
        let table = bhattacharyya_table(spec.channel());
        let p = spec.p_x().probs();
        let n = p.len();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (p[i] * p[j]).sqrt() * (-table.get(i, j)).exp();
            }
        }
        BhattacharyyaKernel { n, a }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_row_slice(self.n, self.n, &self.a);
        SymmetricEigen::new(m).eigenvalues.iter().copied().collect()
    }

    /// `trace(A^K) = sum_i lambda_i^K`.
    pub fn trace_power(&self, k: usize) -> f64 {
        self.eigenvalues().iter().map(|l| l.powi(k as i32)).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.entry(i, i)).sum()
    }
}

/// `psi_2 = -1/2 ln sum_{x1,x2} P(x1) P(x2) exp(-2 d(x1, x2))`.
pub fn psi2_closed_form(spec: &SourceSpec) -> Result<f64> {
    let table = bhattacharyya_table(spec.channel());
    let p = spec.p_x().probs();
    let mut sum = 0.0;
    for (i, pi) in p.iter().enumerate() {
        for (j, pj) in p.iter().enumerate() {
            sum += pi * pj * (-2.0 * table.get(i, j)).exp();
        }
    }
    finish_psi2(sum)
}

/// Same quantity, split into the collision term `exp(-H_2(P_X))` and off-diagonal pairs.
pub fn psi2_collision_form(spec: &SourceSpec) -> Result<f64> {
    let table = bhattacharyya_table(spec.channel());
    let p = spec.p_x().probs();
    let mut off = 0.0;
    for (i, pi) in p.iter().enumerate() {
        for (j, pj) in p.iter().enumerate() {
            if i != j {
                off += pi * pj * (-2.0 * table.get(i, j)).exp();
            }
        }
    }
    finish_psi2((-collision_entropy(spec.p_x())).exp() + off)
}

fn finish_psi2(sum: f64) -> Result<f64> {
    if !(sum > 0.0) {
        return Err(Error::OutOfRange("degenerate source: pair sum is zero".into()));
    }
    Ok(-0.5 * sum.ln())
}

/// `-1/2 ln sum_i lambda_i^2` over the kernel spectrum.
pub fn psi2_trace(spec: &SourceSpec) -> Result<f64> {
    finish_psi2(BhattacharyyaKernel::new(spec).trace_power(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiK {
    pub k: usize,
    pub value: f64,
    pub method: MethodTag,
}

/// Direct cycle sum over `X^K`, guarded by [`CYCLE_SUM_BUDGET`].
pub fn cycle_sum(spec: &SourceSpec, k: usize) -> Result<f64> {
    let n = spec.p_x().len();
    let needed = (n as f64).powi(k as i32);
    if needed > CYCLE_SUM_BUDGET {
        return Err(Error::BudgetExceeded {
            needed,
            budget: CYCLE_SUM_BUDGET,
        });
    }
    let table = bhattacharyya_table(spec.channel());
    let p = spec.p_x().probs();
    let mut digits = vec![0usize; k];
    let mut total = 0.0;
    loop {
        let mut term = 1.0;
        for j in 0..k {
            let (a, b) = (digits[j], digits[(j + 1) % k]);
            term *= p[a] * (-table.get(a, b)).exp();
        }
        total += term;
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(total);
            }
            digits[pos] += 1;
            if digits[pos] < n {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// `psi_K = -(1/K) ln trace(A^K)` from the kernel spectrum, falling back to the
/// direct cycle sum when rounding makes the spectral trace non-positive.
pub fn psi_k_trace(spec: &SourceSpec, k: usize) -> Result<PsiK> {
    if k < 2 {
        return Err(Error::OutOfRange(format!("cycle length {k} must be >= 2")));
    }
    let tr = BhattacharyyaKernel::new(spec).trace_power(k);
    if tr > 0.0 {
        return Ok(PsiK {
            k,
            value: -tr.ln() / k as f64,
            method: MethodTag::Trace,
        });
    }
    let direct = cycle_sum(spec, k)?;
    if !(direct > 0.0) {
        return Err(Error::OutOfRange(format!("cycle sum for K = {k} is not positive")));
    }
    Ok(PsiK {
        k,
        value: -direct.ln() / k as f64,
        method: MethodTag::CycleSum,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleMargin {
    pub k: usize,
    /// `trace(A^K)`, the expected Bhattacharyya factor of a `K`-cycle.
    pub trace: f64,
    /// `exp(-K psi_2)`.
    pub bound: f64,
    /// `bound - trace`; non-negative up to the relative slack.
    pub margin: f64,
}

/// Relative slack allowed when comparing `trace(A^K)` with `exp(-K psi_2)`.
pub const CYCLE_BOUND_SLACK: f64 = 1e-12;

/// Checks `trace(A^K) <= exp(-K psi_2)` for `K = 2..=k_max`; a violation is an error.
pub fn cycle_expectation_bound_check(spec: &SourceSpec, k_max: usize) -> Result<Vec<CycleMargin>> {
    if k_max < 2 {
        return Err(Error::OutOfRange(format!("k_max {k_max} must be >= 2")));
    }
    let psi2 = psi2_closed_form(spec)?;
    let kernel = BhattacharyyaKernel::new(spec);
    let eig = kernel.eigenvalues();
    (2..=k_max)
        .map(|k| {
            let trace: f64 = eig.iter().map(|l| l.powi(k as i32)).sum();
            let bound = (-(k as f64) * psi2).exp();
            if trace > bound * (1.0 + CYCLE_BOUND_SLACK) {
                return Err(Error::BoundViolated { k, trace, bound });
            }
            Ok(CycleMargin {
                k,
                trace,
                bound,
                margin: bound - trace,
            })
        })
        .collect()
}

/// Bhattacharyya distance between the two inputs of a symmetric channel with
/// `y_size` outputs and error probability `alpha`.
pub fn symmetric_d_alpha(alpha: f64, y_size: usize) -> f64 {
    let q = (y_size - 1) as f64;
    let coeff = (4.0 * (1.0 - alpha) * alpha / q).sqrt() + (y_size as f64 - 2.0) * alpha / q;
    if coeff > 0.0 {
        -coeff.ln()
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BscClosedForms {
    pub psi2: f64,
    /// Bhattacharyya coefficient `exp(-d(0, 1))`.
    pub bc: f64,
    pub d_alpha: f64,
}

/// Closed forms for a binary source with `P(1) = p` through a symmetric channel
/// with `y_size` outputs.
pub fn bsc_closed_forms(p: f64, alpha: f64, y_size: usize) -> Result<BscClosedForms> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange(format!("source parameter {p} not in (0,1)")));
    }
    if y_size < 2 {
        return Err(Error::OutOfRange("symmetric channel needs at least 2 outputs".into()));
    }
    let max_alpha = (y_size - 1) as f64 / y_size as f64;
    if !(0.0..=max_alpha).contains(&alpha) {
        return Err(Error::OutOfRange(format!("alpha {alpha} not in [0, {max_alpha}]")));
    }
    let d_alpha = symmetric_d_alpha(alpha, y_size);
    let bc = (-d_alpha).exp();
    let sq = p * p + (1.0 - p) * (1.0 - p);
    let h2 = -sq.ln();
    let psi2 = 0.5 * (h2 - (1.0 + 2.0 * p * (1.0 - p) / sq * bc * bc).ln());
    Ok(BscClosedForms { psi2, bc, d_alpha })
}

/// Uniform source over `q` symbols through the `q`-ary symmetric channel.
pub fn symmetric_spec(q: usize, alpha: f64) -> Result<SourceSpec> {
    SourceSpec::new(Pmf::uniform(q)?, ChannelKernel::symmetric(q, q, alpha)?)
}

pub(crate) fn bhattacharyya(spec: &SourceSpec) -> SymbolDistanceTable {
    bhattacharyya_table(spec.channel())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsc_uniform(alpha: f64) -> SourceSpec {
        SourceSpec::new(Pmf::uniform(2).unwrap(), ChannelKernel::bsc(alpha).unwrap()).unwrap()
    }

    #[test]
    fn bsc_uniform_closed_form() {
        let spec = bsc_uniform(0.1);
        let v = psi2_closed_form(&spec).unwrap();
        let expected = 0.5 * (std::f64::consts::LN_2 - (1.0f64 + 4.0 * 0.1 * 0.9).ln());
        assert!((v - expected).abs() < 1e-15);
        assert!((v - 0.192831).abs() < 1e-6);
        assert!((psi2_collision_form(&spec).unwrap() - v).abs() < 1e-15);
        assert!((psi2_trace(&spec).unwrap() - v).abs() < 1e-14);
    }

    #[test]
    fn clean_limit_is_half_collision_entropy() {
        let spec = bsc_uniform(0.0);
        let v = psi2_closed_form(&spec).unwrap();
        assert!((v - 0.5 * std::f64::consts::LN_2).abs() < 1e-15);
        let near = psi2_closed_form(&bsc_uniform(1e-12)).unwrap();
        assert!((near - 0.346574).abs() < 1e-5);
        assert!(near < v);
    }

    #[test]
    fn psi_k_two_matches_psi2() {
        let spec = bsc_uniform(0.1);
        let k2 = psi_k_trace(&spec, 2).unwrap();
        assert_eq!(k2.method, MethodTag::Trace);
        assert!((k2.value - psi2_closed_form(&spec).unwrap()).abs() < 1e-12);
        assert!(psi_k_trace(&spec, 1).is_err());
    }

    #[test]
    fn psi3_dominates_and_matches_cycle_sum() {
        let spec = bsc_uniform(0.1);
        let k3 = psi_k_trace(&spec, 3).unwrap().value;
        let direct = -cycle_sum(&spec, 3).unwrap().ln() / 3.0;
        assert!((k3 - direct).abs() < 1e-13);
        assert!(k3 >= psi2_closed_form(&spec).unwrap());
    }

    #[test]
    fn cycle_check_margins() {
        let spec = bsc_uniform(0.1);
        let margins = cycle_expectation_bound_check(&spec, 8).unwrap();
        assert_eq!(margins.len(), 7);
        assert!(margins[0].margin.abs() < 1e-15);
        assert!(margins.iter().all(|m| m.margin >= -CYCLE_BOUND_SLACK * m.bound));
        assert!(cycle_expectation_bound_check(&spec, 1).is_err());
    }

    #[test]
    fn closed_forms_for_symmetric_channels() {
        let f = bsc_closed_forms(0.5, 0.1, 2).unwrap();
        assert!((f.d_alpha - 0.510826).abs() < 1e-6);
        assert!((f.bc - (0.36f64).sqrt()).abs() < 1e-15);
        let expected = 0.5 * (std::f64::consts::LN_2 - (1.0f64 + 0.36).ln());
        assert!((f.psi2 - expected).abs() < 1e-15);
        let q4 = bsc_closed_forms(0.5, 0.1, 4).unwrap();
        assert!((q4.d_alpha - 0.8841216787).abs() < 1e-9);
        assert!(bsc_closed_forms(0.0, 0.1, 2).is_err());
        assert!(bsc_closed_forms(0.5, 0.6, 2).is_err());
    }
}
