//! Pair and cycle rate functions for a binary source behind a BSC, by every route.
//!
//! cargo run --example rate_functions -- 0.1

use reforder::model::{ChannelKernel, Pmf, SourceSpec};
use reforder::rates::{
    bsc_closed_forms, cycle_expectation_bound_check, phi_k_reduced, phi_limit, psi2_closed_form, psi2_collision_form,
    psi2_optimizer_oracle, psi2_trace, psi_k_trace,
};

fn main() -> reforder::Result<()> {
    let alpha: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.1);
    let spec = SourceSpec::new(Pmf::uniform(2)?, ChannelKernel::bsc(alpha)?)?;

    let psi2 = psi2_closed_form(&spec)?;
    println!("BSC({alpha}), uniform source");
    println!("  psi2 closed form    {psi2:.12}");
    println!("  psi2 collision form {:.12}", psi2_collision_form(&spec)?);
    println!("  psi2 kernel trace   {:.12}", psi2_trace(&spec)?);
    let oracle = psi2_optimizer_oracle(&spec, 1e-12)?;
    println!(
        "  psi2 mirror descent {:.12} ({} iterations)",
        oracle.value, oracle.iterations
    );
    println!("  binary closed form  {:.12}", bsc_closed_forms(0.5, alpha, 2)?.psi2);
    println!("  beta threshold      {:.6}", 1.0 / psi2);

    println!("\n  K   psi_K      trace(a^K)   exp(-K psi2)");
    let margins = cycle_expectation_bound_check(&spec, 8)?;
    for m in &margins {
        let psi_k = psi_k_trace(&spec, m.k)?;
        println!("  {:<3} {:.6}  {:.6e}  {:.6e}", m.k, psi_k.value, m.trace, m.bound);
    }

    println!("\n  phi_4 = {:.6}", phi_k_reduced(&spec, 4, 0.01)?);
    println!("  phi_8 = {:.6}", phi_k_reduced(&spec, 8, 0.01)?);
    println!("  phi_inf = {:.6}", phi_limit(&spec, 0.01)?);
    Ok(())
}
