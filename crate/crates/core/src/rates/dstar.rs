//! Minimal Bhattacharyya distance at distortion level `delta` and the resulting
//! `(xi, delta)` trade-off.
//!
//! `d*(delta) = min { sum_Q d : Q on X x X, sum_Q Delta >= delta }` is a linear program
//! over the simplex cut by one halfspace, so some optimum is supported on at most two
//! atoms. Enumerating single atoms with `Delta >= delta` and atom pairs straddling
//! `delta` (mixed to sit exactly on the constraint) gives the exact value.

use serde::{Deserialize, Serialize};

use super::psi::{bhattacharyya, MethodTag};
use crate::distances::DistortionMeasure;
use crate::entropy::shannon_entropy;
use crate::error::{Error, Result};
use crate::io::ext_f64;
use crate::model::SourceSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DStarSolution {
    #[serde(with = "ext_f64")]
    pub value: f64,
    /// Optimal atoms `((x1, x2), mass)`; empty when infeasible.
    pub support: Vec<((usize, usize), f64)>,
}

pub fn d_star(spec: &SourceSpec, measure: &DistortionMeasure, delta: f64) -> Result<f64> {
    Ok(d_star_solution(spec, measure, delta)?.value)
}

pub fn d_star_solution(spec: &SourceSpec, measure: &DistortionMeasure, delta: f64) -> Result<DStarSolution> {
    let n = spec.p_x().len();
    if measure.size() != n {
        return Err(Error::Dimension(format!(
            "distortion measure is {}x{}, source alphabet has {n} symbols",
            measure.size(),
            measure.size()
        )));
    }
    let max = measure.max_value();
    if !(0.0..=max).contains(&delta) {
        return Err(Error::OutOfRange(format!("delta {delta} not in [0, {max}]")));
    }
    let table = bhattacharyya(spec);
    let atoms: Vec<((usize, usize), f64, f64)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| ((a, b), table.get(a, b), measure.get(a, b)))
        .filter(|(_, c, _)| c.is_finite())
        .collect();

    let mut best = DStarSolution {
        value: f64::INFINITY,
        support: Vec::new(),
    };
    for &(pair, c, dist) in &atoms {
        if dist >= delta && c < best.value {
            best = DStarSolution {
                value: c,
                support: vec![(pair, 1.0)],
            };
        }
    }
    for &(lo_pair, lo_c, lo_d) in atoms.iter().filter(|a| a.2 < delta) {
        for &(hi_pair, hi_c, hi_d) in atoms.iter().filter(|a| a.2 > delta) {
            let t = (delta - lo_d) / (hi_d - lo_d);
            let value = (1.0 - t) * lo_c + t * hi_c;
            if value < best.value {
                best = DStarSolution {
                    value,
                    support: vec![(lo_pair, 1.0 - t), (hi_pair, t)],
                };
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub delta: f64,
    #[serde(with = "ext_f64")]
    pub d_star: f64,
    /// `H(P_X) / d*(delta)`.
    #[serde(with = "ext_f64")]
    pub xi_min: f64,
    /// No admissible failure level below 1 at this `delta`.
    pub vacuous: bool,
    pub method: MethodTag,
}

pub fn tradeoff_curve(spec: &SourceSpec, measure: &DistortionMeasure, deltas: &[f64]) -> Result<Vec<TradeoffPoint>> {
    let h = shannon_entropy(spec.p_x());
    deltas
        .iter()
        .map(|&delta| {
            let ds = d_star(spec, measure, delta)?;
            let xi_min = if ds == 0.0 {
                f64::INFINITY
            } else if ds.is_infinite() {
                0.0
            } else {
                h / ds
            };
            Ok(TradeoffPoint {
                delta,
                d_star: ds,
                xi_min,
                vacuous: !(xi_min < 1.0),
                method: MethodTag::Lp,
            })
        })
        .collect()
}
