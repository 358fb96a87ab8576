//! Instances with known answers: planted corruptions of sampled point sets,
//! the three hardness reductions, and the worked 9-point example.

mod fixtures;
mod planted;
mod reductions;

pub use fixtures::{overbudget_gadget, paper_example, paper_repaired, paper_witness};
pub use planted::{planted_instance, NoiseKind, PlantedSpec, PlantedTruth};
pub use reductions::{maxcut_reduction, random_graph, random_sign_matrix, rank_reduction, vc_reduction};
