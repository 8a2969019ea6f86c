use serde::{Deserialize, Serialize};

use super::cell::CellResult;
use crate::error::{Error, Result};
use crate::stats::rule_of_three;

/// What to do with cells that saw no failures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroPolicy {
    /// Leave them out of the fit and list them.
    #[default]
    Exclude,
    /// Use the one-sided bound `3 / trials` in place of 0.
    RuleOfThree,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    /// `M` values that entered the fit.
    pub used: Vec<usize>,
    /// Zero-failure cells: `(M, 3 / trials)`.
    pub zero_cells: Vec<(usize, f64)>,
}

/// Least squares of `ln y` on `ln x`; returns `(slope, stderr, intercept)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 3 {
        return Err(Error::OutOfRange(format!(
            "power-law fit needs 3 points, got {}",
            points.len()
        )));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::OutOfRange("power-law fit needs distinct x values".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (ssr / (n - 2.0) / sxx).sqrt();
    Ok((slope, stderr, intercept))
}

/// Fits `ln fp_hat` against `ln M` over the given cells.
pub fn slope_fit(results: &[CellResult], policy: ZeroPolicy) -> Result<SlopeFit> {
    let mut points = Vec::new();
    let mut used = Vec::new();
    let mut zero_cells = Vec::new();
    for r in results {
        if r.failures == 0 {
            let bound = rule_of_three(r.trials);
            zero_cells.push((r.m, bound));
            if policy == ZeroPolicy::RuleOfThree {
                points.push((r.m as f64, bound));
                used.push(r.m);
            }
        } else {
            points.push((r.m as f64, r.fp_hat));
            used.push(r.m);
        }
    }
    if points.len() < 3 {
        return Err(Error::OutOfRange(format!(
            "slope fit needs at least 3 usable cells, got {} ({} with no failures)",
            points.len(),
            zero_cells.len()
        )));
    }
    let (slope, stderr, intercept) = fit_power_law(&points)?;
    Ok(SlopeFit {
        slope,
        stderr,
        intercept,
        used,
        zero_cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(m: usize, failures: u64, trials: u64) -> CellResult {
        CellResult {
            seed: 0,
            m,
            l: 1,
            beta: 1.0,
            source: "uniform".into(),
            channel_param: 0.1,
            delta: 0.0,
            xi: 0.0,
            trials,
            failures,
            fp_hat: failures as f64 / trials as f64,
            ci_lo: 0.0,
            ci_hi: 1.0,
            mean_xi: 0.0,
            runtime_ms: 0,
        }
    }

    #[test]
    fn recovers_known_power_law() {
        let pts: Vec<(f64, f64)> = [16.0, 32.0, 64.0, 128.0]
            .iter()
            .map(|&m: &f64| (m, 0.7 * m.powf(-1.08)))
            .collect();
        let (slope, se, icpt) = fit_power_law(&pts).unwrap();
        assert!((slope + 1.08).abs() < 1e-12);
        assert!(se < 1e-10);
        assert!((icpt - 0.7f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_cells_are_listed() {
        let cells = [
            cell(16, 40, 1000),
            cell(32, 20, 1000),
            cell(64, 10, 1000),
            cell(128, 0, 1000),
        ];
        let fit = slope_fit(&cells, ZeroPolicy::Exclude).unwrap();
        assert_eq!(fit.used, vec![16, 32, 64]);
        assert_eq!(fit.zero_cells, vec![(128, 0.003)]);
        assert!((fit.slope + 1.0).abs() < 1e-12);
        let with = slope_fit(&cells, ZeroPolicy::RuleOfThree).unwrap();
        assert_eq!(with.used.len(), 4);
        assert!(slope_fit(&cells[1..], ZeroPolicy::Exclude).is_err());
    }
}
