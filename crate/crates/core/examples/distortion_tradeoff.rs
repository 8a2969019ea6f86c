//! Minimal Bhattacharyya distance at a distortion level, and the smallest failure
//! level the partial-recovery bound allows, for a low-entropy binary source.

use reforder::distances::DistortionMeasure;
use reforder::entropy::{bernoulli_with_entropy, shannon_entropy};
use reforder::model::{ChannelKernel, Pmf, SourceSpec};
use reforder::rates::{d_star_solution, symmetric_d_alpha, tradeoff_curve};

fn main() -> reforder::Result<()> {
    let p = bernoulli_with_entropy(0.1)?;
    let spec = SourceSpec::new(Pmf::bernoulli(p)?, ChannelKernel::bsc(0.1)?)?;
    let hamming = DistortionMeasure::hamming(2);
    println!(
        "P(1) = {p:.6}, H = {:.4} nats, d_alpha = {:.6}",
        shannon_entropy(spec.p_x()),
        symmetric_d_alpha(0.1, 2)
    );

    let sol = d_star_solution(&spec, &hamming, 0.5)?;
    println!("d*(0.5) = {:.6} on atoms {:?}", sol.value, sol.support);

    let deltas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    println!("\ndelta   d*        xi_min");
    for t in tradeoff_curve(&spec, &hamming, &deltas)? {
        let note = if t.vacuous { "  (vacuous)" } else { "" };
        println!("{:<6}  {:<8.5}  {:<8.5}{note}", t.delta, t.d_star, t.xi_min);
    }

    // A ternary source with a non-Hamming distortion.
    let ternary = SourceSpec::new(Pmf::new(vec![0.5, 0.3, 0.2])?, ChannelKernel::symmetric(3, 3, 0.2)?)?;
    let ramp = DistortionMeasure::from_rows(vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]])?;
    println!("\nternary, |i - j| distortion:");
    for t in tradeoff_curve(&ternary, &ramp, &[0.25, 0.5, 1.0, 1.5, 2.0])? {
        println!("  d*({}) = {:.5}", t.delta, t.d_star);
    }
    Ok(())
}
