//! Rate functions: `psi_2`, `psi_K`, the relaxation `phi_K`, `d*(delta)` and the
//! `(xi, delta)` trade-off. Each quantity has at least two evaluation routes.

mod dstar;
mod mirror;
mod phi;
mod psi;
mod report;

pub use dstar::{d_star, d_star_solution, tradeoff_curve, DStarSolution, TradeoffPoint};
pub use mirror::{gibbs_target, marginals, psi2_optimizer_oracle, Psi2OracleSolution};
pub use phi::{phi_k_reduced, phi_limit, phi_weighted, PhiSolution};
pub use psi::{
    bsc_closed_forms, cycle_expectation_bound_check, cycle_sum, psi2_closed_form, psi2_collision_form, psi2_trace,
    psi_k_trace, symmetric_d_alpha, symmetric_spec, BhattacharyyaKernel, BscClosedForms, CycleMargin, MethodTag, PsiK,
    CYCLE_BOUND_SLACK,
};
pub use report::{rate_report, RateOptions, RateReport, TaggedValue};
