//! Polynomial-time approximations for outlier deletion.

mod obstruction;
mod two_approx;
mod vertex_cover;

pub use obstruction::{greedy_outliers, greedy_outliers_in, obstruction_set};
pub use two_approx::{
    default_trials, run_trial, sieve, two_approx_outliers, two_approx_trace, LevelRecord, SieveState, TrialRecord,
    TwoApproxTrace,
};
pub use vertex_cover::vertex_cover_2approx;
