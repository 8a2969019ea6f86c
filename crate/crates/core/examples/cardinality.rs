//! Fragment histograms and the number of distinct reconstructions they admit.

use reforder::entropy::bernoulli_with_entropy;
use reforder::fragments::{
    cardinality_concentration_experiment, fragment_and_shuffle, histogram, log_num_reconstructions,
};
use reforder::model::{ChannelKernel, FragmentConfig, Pmf, SourceSpec};
use reforder::rng::RngStream;

fn main() -> reforder::Result<()> {
    let p = bernoulli_with_entropy(0.3)?;
    let spec = SourceSpec::new(Pmf::bernoulli(p)?, ChannelKernel::bsc(0.1)?)?;

    let config = FragmentConfig::from_beta(64, 0.5)?;
    let inst = fragment_and_shuffle(&spec, config, &mut RngStream::new(1, 0))?;
    let h = histogram(&inst, 2);
    println!(
        "M = {}, L = {}: {} distinct fragments, multiplicities {:?}",
        config.m(),
        config.l(),
        h.distinct(),
        h.multiplicities()
    );
    println!(
        "ln |A| = {:.4}, M H(G/M) = {:.4}",
        log_num_reconstructions(&h),
        config.m() as f64 * h.empirical_entropy()
    );

    println!("\n   M   L  tail  rate      ci_hi     mean (1/M) ln |A|  threshold");
    let mut stream = 0;
    for m in [64, 256, 1024] {
        let cfg = FragmentConfig::from_beta(m, 0.5)?;
        let r = cardinality_concentration_experiment(&spec, cfg, 0.2, 1000, 1, stream)?;
        stream += 1000;
        println!(
            "{m:>4} {:>3} {:>5}  {:.4}  {:.4}    {:.5}            {:.5}",
            r.l, r.tail_count, r.tail_rate, r.ci.hi, r.mean_logcard, r.threshold
        );
    }
    Ok(())
}
