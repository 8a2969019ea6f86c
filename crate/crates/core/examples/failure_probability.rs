//! Monte Carlo failure probability against M at fixed beta, with a log-log slope.
//!
//! cargo run --release --example failure_probability -- [trials]

use reforder::distances::DistortionMeasure;
use reforder::experiments::{estimate_fp, slope_fit, CellResult, ZeroPolicy};
use reforder::model::{ChannelKernel, FragmentConfig, Pmf, SourceSpec};
use reforder::rates::psi2_closed_form;

fn main() -> reforder::Result<()> {
    let trials: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20_000);
    let spec = SourceSpec::new(Pmf::uniform(2)?, ChannelKernel::bsc(0.1)?)?;
    let hamming = DistortionMeasure::hamming(2);
    let beta = 4.0;
    let psi2 = psi2_closed_form(&spec)?;
    println!(
        "beta = {beta}, predicted slope 2(1 - beta psi2) = {:.3}",
        2.0 * (1.0 - beta * psi2)
    );

    let mut cells = Vec::new();
    let mut stream = 0;
    for m in [8, 16, 32, 64] {
        let config = FragmentConfig::from_beta(m, beta)?;
        let est = estimate_fp(&spec, config, &hamming, 0.0, 0.0, trials, 11, stream)?;
        stream += trials;
        println!(
            "M = {m:>3}  L = {:>2}  FP = {:.4e}  [{:.4e}, {:.4e}]  mean Xi = {:.4}",
            config.l(),
            est.fp_hat,
            est.ci.lo,
            est.ci.hi,
            est.mean_xi
        );
        cells.push(CellResult::new(11, config, "uniform", 0.1, 0.0, 0.0, &est));
    }
    let fit = slope_fit(&cells, ZeroPolicy::Exclude)?;
    println!("fitted slope {:.3} +- {:.3}", fit.slope, fit.stderr);
    Ok(())
}
