use serde::{Deserialize, Serialize};

use super::cell::{estimate_fp, CellResult};
use crate::distances::DistortionMeasure;
use crate::entropy::shannon_entropy;
use crate::error::{Error, Result};
use crate::model::{FragmentConfig, SourceSpec};
use crate::rates::d_star;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TradeoffExperiment {
    pub entropy: f64,
    pub beta: f64,
    pub delta: f64,
    pub d_star: f64,
    /// `H(P_X) / d*(delta)`.
    pub xi_min: f64,
    /// Ordered by `M`, then by `xi`.
    pub cells: Vec<CellResult>,
    /// Per `M`: the smallest `xi` in the grid whose estimate drops below 1/2.
    pub transitions: Vec<(usize, Option<f64>)>,
}

/// Estimates `FP(delta, xi)` over `ms x xi_grid` at fixed `beta` with `beta H(P_X) < 1`.
#[allow(clippy::too_many_arguments)]
pub fn tradeoff_experiment(
    spec: &SourceSpec,
    (source, channel_param): (&str, f64),
    ms: &[usize],
    beta: f64,
    measure: &DistortionMeasure,
    delta: f64,
    xi_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<TradeoffExperiment> {
    let entropy = shannon_entropy(spec.p_x());
    if !(beta * entropy < 1.0) {
        return Err(Error::OutOfRange(format!(
            "beta * H(P_X) = {} must be below 1",
            beta * entropy
        )));
    }
    let ds = d_star(spec, measure, delta)?;
    let xi_min = if ds > 0.0 { entropy / ds } else { f64::INFINITY };
    let mut cells = Vec::new();
    let mut transitions = Vec::new();
    let mut stream = 0u64;
    for &m in ms {
        let config = FragmentConfig::from_beta(m, beta)?;
        let mut transition = None;
        for &xi in xi_grid {
            let est = estimate_fp(spec, config, measure, delta, xi, trials, seed, stream)?;
            stream += trials;
            if transition.is_none() && est.fp_hat < 0.5 {
                transition = Some(xi);
            }
            cells.push(CellResult::new(seed, config, source, channel_param, delta, xi, &est));
        }
        transitions.push((m, transition));
    }
    Ok(TradeoffExperiment {
        entropy,
        beta,
        delta,
        d_star: ds,
        xi_min,
        cells,
        transitions,
    })
}
