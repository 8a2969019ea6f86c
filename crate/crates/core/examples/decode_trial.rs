//! One shuffled instance, its log-likelihood weights and the ML reordering.
//!
//! cargo run --example decode_trial -- [seed] [--json]

use reforder::decoder::{build_weights, is_failure, reconstruct_with, DecodedTrial};
use reforder::distances::DistortionMeasure;
use reforder::fragments::fragment_and_shuffle;
use reforder::model::{ChannelKernel, FragmentConfig, Pmf, SourceSpec};
use reforder::rng::RngStream;

fn main() -> reforder::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let seed: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let json = args.iter().any(|a| a == "--json");

    let spec = SourceSpec::new(Pmf::uniform(2)?, ChannelKernel::bsc(0.2)?)?;
    let config = FragmentConfig::from_length(6, 4)?;
    let inst = fragment_and_shuffle(&spec, config, &mut RngStream::new(seed, 0))?;
    let weights = build_weights(&inst, &spec);
    let recon = reconstruct_with(&inst, &weights, &DistortionMeasure::hamming(2), 0.0)?;

    if json {
        let dump = DecodedTrial::new(&inst, &weights, recon, (seed, 0), (0.0, 0.0));
        println!("{}", serde_json::to_string_pretty(&dump)?);
        return Ok(());
    }

    let show = |s: &[u8]| s.iter().map(|b| char::from(b'0' + b)).collect::<String>();
    println!("x       {}", show(&inst.x_seq));
    println!("y       {}", show(&inst.y_seq));
    println!("shuffle {:?}", inst.hidden_perm);
    println!("\nweights (row = shuffled fragment, column = slot):");
    for (i, row) in weights.rows().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|w| format!("{w:7.2}")).collect();
        println!("  {} {}", show(&inst.fragments[i]), cells.join(""));
    }
    println!("\nassignment {:?}", recon.assignment);
    println!("x_hat   {}", show(&recon.x_hat));
    println!("distortion per slot {:?}", recon.per_fragment_distortion);
    println!(
        "Xi = {}, failure at xi = 0: {}",
        recon.xi_delta,
        is_failure(&recon, 0.0)
    );
    Ok(())
}
