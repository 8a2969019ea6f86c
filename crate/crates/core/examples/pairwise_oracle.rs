//! Exact transposition probabilities for short fragments and the exact failure
//! probability of a two-fragment instance.

use reforder::distances::DistortionMeasure;
use reforder::experiments::{exact_fp_enumeration, exact_transposition_probability};
use reforder::model::{ChannelKernel, FragmentConfig, Pmf, SourceSpec};
use reforder::rates::psi2_closed_form;

fn main() -> reforder::Result<()> {
    let spec = SourceSpec::new(Pmf::uniform(2)?, ChannelKernel::bsc(0.1)?)?;
    let psi2 = psi2_closed_form(&spec)?;
    println!("psi2 = {psi2:.6}");
    println!("l  P[E12]        exp(-2 l psi2)  -ln P / 2l");
    for l in 1..=6 {
        let p = exact_transposition_probability(&spec, l)?;
        let bound = (-2.0 * l as f64 * psi2).exp();
        println!("{l}  {p:.6e}  {bound:.6e}    {:.6}", -p.ln() / (2.0 * l as f64));
    }

    println!("\nexact FP, M = 2:");
    for l in 1..=3 {
        let fp = exact_fp_enumeration(
            &spec,
            FragmentConfig::from_length(2, l)?,
            &DistortionMeasure::hamming(2),
            0.0,
            0.0,
        )?;
        println!("  L = {l}: {fp:.8}");
    }
    Ok(())
}
