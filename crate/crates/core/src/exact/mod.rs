//! Exact fixed-parameter solvers.

mod branching;
mod compress;
mod partition;
pub(crate) mod weeo;

pub use branching::{
    alg1_branch, alg2_branch, alg2_traced, eeo_dispatch, solve_eeo, EeoAlgorithm, MeasureEdge,
};
pub use compress::{compress, size_bound, CompressionTrace, ForcingRule, Verdict, XClasses};
pub use partition::{is_pair_x_compatible, is_x_compatible, partition_into_bases, BasisPartition};
pub use weeo::{solve_weeo, GuessTuple, WeeoOptions, WeeoOutcome};
