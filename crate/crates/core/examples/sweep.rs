//! A JSON sweep plan run into a resumable CSV, then resumed after a simulated crash.

use reforder::experiments::{read_experiment_csv, run_sweep, SweepOptions, SweepPlan};

const PLAN: &str = r#"{
  "seed": 5,
  "source": "uniform",
  "channel": "bsc",
  "alpha": [0.05, 0.1, 0.15],
  "m": [8, 16],
  "beta": [3.0],
  "delta": [0.0],
  "xi": [0.0],
  "trials": 4000
}"#;

fn main() -> reforder::Result<()> {
    let plan = SweepPlan::from_json(PLAN)?;
    let dir = std::env::temp_dir().join("reforder-sweep-example");
    std::fs::create_dir_all(&dir).map_err(|e| reforder::Error::Io {
        context: "creating temp dir".into(),
        source: e,
    })?;
    let out = dir.join("sweep.csv");
    let _ = std::fs::remove_file(&out);
    let opts = SweepOptions {
        resume: true,
        ..Default::default()
    };

    let rows = run_sweep(&plan, Some(&out), &opts)?;
    for r in &rows {
        println!(
            "alpha {:<5} M {:>3} L {:>2}  FP {:.4}",
            r.channel_param, r.m, r.l, r.fp_hat
        );
    }

    // Drop the last two rows and half a line, then resume.
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    let mut cut = text.len();
    for _ in 0..3 {
        cut = text[..cut - 1].rfind('\n').map(|i| i + 1).unwrap_or(0);
    }
    std::fs::write(&out, &text[..cut + 10]).ok();
    run_sweep(&plan, Some(&out), &opts)?;
    let resumed = read_experiment_csv(&out)?;
    println!("\nresumed {} rows, identical: {}", resumed.len(), resumed == rows);
    println!("output: {}", out.display());
    Ok(())
}
