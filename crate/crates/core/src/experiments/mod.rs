//! Monte Carlo estimation of the reconstruction failure probability, exact
//! small-instance oracles, slope fits and resumable sweeps.

mod cell;
mod fit;
mod oracles;
mod sweep;
mod tradeoff;

pub use cell::{estimate_fp, run_trial, CellResult, FpEstimate, EXPERIMENT_HEADER};
pub use fit::{fit_power_law, slope_fit, SlopeFit, ZeroPolicy};
pub use oracles::{
    all_permutations, exact_fp_enumeration, exact_transposition_probability, EXACT_FP_BUDGET, TRANSPOSITION_BUDGET,
};
pub use sweep::{read_experiment_csv, run_sweep, PlannedCell, SweepOptions, SweepPlan};
pub use tradeoff::{tradeoff_experiment, TradeoffExperiment};
