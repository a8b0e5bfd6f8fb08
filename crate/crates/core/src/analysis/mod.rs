//! Analytic quantities: expected one-step reductions, the terms separating
//! the three algorithms, the mean update matrix and epsilon-averaging times.

mod eps_time;
mod reductions;
mod spectral;

pub use eps_time::{empirical_eps_time, EpsilonTimeEstimate, MIN_RUNS};
pub use reductions::{
    eta, gamma, gg_expected_reduction, monotonicity_check, rg_expected_reduction,
    sgg_expected_reduction, sgg_expected_reduction_bruteforce, BoundReport, BRUTEFORCE_DEGREE_CAP,
};
pub use spectral::{lambda2, rg_eps_time_bound, rg_mean_update_matrix, UpdateMatrix};
