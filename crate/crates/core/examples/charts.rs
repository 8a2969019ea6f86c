//! Writes psi_2 against alpha for uniform sources through symmetric channels as an SVG.
//!
//! cargo run --example charts -- psi2.svg

use reforder::chart::{Chart, Series};
use reforder::model::{ChannelKernel, Pmf, SourceSpec};
use reforder::rates::psi2_closed_form;

fn main() -> reforder::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "psi2.svg".into());
    let mut chart = Chart::new("psi_2, uniform source, symmetric channel", "alpha", "psi_2 (nats)");
    for q in [2, 3, 4, 8] {
        let max = (q - 1) as f64 / q as f64;
        let pts = (0..=50)
            .map(|i| 0.5 * i as f64 / 50.0)
            .filter(|&a| a <= max)
            .map(|a| {
                let spec = SourceSpec::new(Pmf::uniform(q)?, ChannelKernel::symmetric(q, q, a)?)?;
                Ok((a, psi2_closed_form(&spec)?))
            })
            .collect::<reforder::Result<Vec<_>>>()?;
        chart.series.push(Series::new(format!("|X| = {q}"), pts));
    }
    chart.write(std::path::Path::new(&path))?;
    println!("wrote {path}");
    Ok(())
}
