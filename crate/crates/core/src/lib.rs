//! Euclidean embedding of finite distance spaces with outlier deletion and
//! distance modification.
//!
//! All distances are handled in squared form. The [`geometry`] module holds the
//! embeddability predicates every solver builds on; [`exact`] and [`approx`]
//! contain the solvers, [`oracle`] brute-force references, and [`generators`]
//! instance families with known answers.

pub mod approx;
pub mod cli;
pub mod error;
pub mod exact;
pub mod feasibility;
pub mod generators;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod oracle;
pub(crate) mod rng;
pub mod scalar;
pub mod space;

pub use error::{Error, Result};
pub use geometry::{Backend, Geometry, Realization, ToleranceConfig};
pub use space::{DistanceSpace, Pair, Solution, WeightedInstance};
