use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::{build_weights, is_failure, reconstruct_with, Reconstruction, WeightMatrix};
use crate::distances::DistortionMeasure;
use crate::error::{Error, Result};
use crate::fragments::{fragment_and_shuffle, ShuffledInstance};
use crate::model::{FragmentConfig, SourceSpec};
use crate::rng::RngStream;
use crate::stats::{clopper_pearson, Interval};

pub const EXPERIMENT_HEADER: [&str; 15] = [
    "seed",
    "M",
    "L",
    "beta",
    "source",
    "channel_param",
    "delta",
    "xi",
    "trials",
    "failures",
    "fp_hat",
    "ci_lo",
    "ci_hi",
    "mean_xi",
    "runtime_ms",
];

/// Aggregate of one Monte Carlo cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FpEstimate {
    pub trials: u64,
    pub failures: u64,
    pub fp_hat: f64,
    /// 95% Clopper-Pearson.
    pub ci: Interval,
    pub mean_xi: f64,
    pub runtime_ms: u64,
}

/// Samples, shuffles and decodes one trial on stream `stream`.
pub fn run_trial(
    spec: &SourceSpec,
    config: FragmentConfig,
    measure: &DistortionMeasure,
    delta: f64,
    seed: u64,
    stream: u64,
) -> Result<(ShuffledInstance, WeightMatrix, Reconstruction)> {
    let mut rng = RngStream::new(seed, stream);
    let instance = fragment_and_shuffle(spec, config, &mut rng)?;
    let weights = build_weights(&instance, spec);
    let recon = reconstruct_with(&instance, &weights, measure, delta)?;
    Ok((instance, weights, recon))
}

/// Runs `trials` independent trials on streams `first_stream..first_stream + trials`
/// in the current rayon pool. Counts do not depend on the pool size.
#[allow(clippy::too_many_arguments)]
pub fn estimate_fp(
    spec: &SourceSpec,
    config: FragmentConfig,
    measure: &DistortionMeasure,
    delta: f64,
    xi: f64,
    trials: u64,
    seed: u64,
    first_stream: u64,
) -> Result<FpEstimate> {
    if trials == 0 {
        return Err(Error::OutOfRange("trials must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::OutOfRange(format!("xi {xi} not in [0,1)")));
    }
    if measure.size() != spec.p_x().len() {
        return Err(Error::Dimension(
            "distortion measure does not match the source alphabet".into(),
        ));
    }
    let start = Instant::now();
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (_, _, recon) = run_trial(spec, config, measure, delta, seed, first_stream + t)?;
            Ok((is_failure(&recon, xi), recon.xi_delta))
        })
        .collect::<Result<Vec<_>>>()?;
    let failures = outcomes.iter().filter(|o| o.0).count() as u64;
    let xi_sum: f64 = outcomes.iter().map(|o| o.1).sum();
    Ok(FpEstimate {
        trials,
        failures,
        fp_hat: failures as f64 / trials as f64,
        ci: clopper_pearson(failures, trials, 0.95)?,
        mean_xi: xi_sum / trials as f64,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

/// One row of the experiment CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub seed: u64,
    pub m: usize,
    pub l: usize,
    pub beta: f64,
    pub source: String,
    pub channel_param: f64,
    pub delta: f64,
    pub xi: f64,
    pub trials: u64,
    pub failures: u64,
    pub fp_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_xi: f64,
    pub runtime_ms: u64,
}

impl CellResult {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        seed: u64,
        config: FragmentConfig,
        source: &str,
        channel_param: f64,
        delta: f64,
        xi: f64,
        est: &FpEstimate,
    ) -> Self {
        CellResult {
            seed,
            m: config.m(),
            l: config.l(),
            beta: config.beta(),
            source: source.to_string(),
            channel_param,
            delta,
            xi,
            trials: est.trials,
            failures: est.failures,
            fp_hat: est.fp_hat,
            ci_lo: est.ci.lo,
            ci_hi: est.ci.hi,
            mean_xi: est.mean_xi,
            runtime_ms: est.runtime_ms,
        }
    }

    pub fn ci(&self) -> Interval {
        Interval {
            lo: self.ci_lo,
            hi: self.ci_hi,
        }
    }

    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            self.m.to_string(),
            self.l.to_string(),
            self.beta.to_string(),
            self.source.clone(),
            self.channel_param.to_string(),
            self.delta.to_string(),
            self.xi.to_string(),
            self.trials.to_string(),
            self.failures.to_string(),
            self.fp_hat.to_string(),
            self.ci_lo.to_string(),
            self.ci_hi.to_string(),
            self.mean_xi.to_string(),
            self.runtime_ms.to_string(),
        ]
    }

    pub fn from_record(rec: &csv::StringRecord) -> Result<Self> {
        if rec.len() != EXPERIMENT_HEADER.len() {
            return Err(Error::Parse(format!(
                "experiment row has {} fields, expected 15",
                rec.len()
            )));
        }
        fn f<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
            rec[i]
                .parse()
                .map_err(|_| Error::Parse(format!("column {} = '{}' is not valid", EXPERIMENT_HEADER[i], &rec[i])))
        }
        Ok(CellResult {
            seed: f(rec, 0)?,
            m: f(rec, 1)?,
            l: f(rec, 2)?,
            beta: f(rec, 3)?,
            source: rec[4].to_string(),
            channel_param: f(rec, 5)?,
            delta: f(rec, 6)?,
            xi: f(rec, 7)?,
            trials: f(rec, 8)?,
            failures: f(rec, 9)?,
            fp_hat: f(rec, 10)?,
            ci_lo: f(rec, 11)?,
            ci_hi: f(rec, 12)?,
            mean_xi: f(rec, 13)?,
            runtime_ms: f(rec, 14)?,
        })
    }

    /// Identifies the cell within a sweep (everything before the outcome columns).
    pub fn key(&self) -> String {
        self.to_record()[..8].join(",")
    }
}

pub(crate) fn cell_key(
    seed: u64,
    config: FragmentConfig,
    source: &str,
    channel_param: f64,
    delta: f64,
    xi: f64,
) -> String {
    [
        seed.to_string(),
        config.m().to_string(),
        config.l().to_string(),
        config.beta().to_string(),
        source.to_string(),
        channel_param.to_string(),
        delta.to_string(),
        xi.to_string(),
    ]
    .join(",")
}
