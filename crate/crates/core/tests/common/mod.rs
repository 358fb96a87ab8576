//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use std::ops::RangeInclusive;

use edmrepair::generators::{planted_instance, NoiseKind, PlantedSpec};
use edmrepair::space::pair_count;
use edmrepair::{Pair, WeightedInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Mix {
    pub n: RangeInclusive<usize>,
    pub d: RangeInclusive<usize>,
    pub k_out: RangeInclusive<usize>,
    pub k_mod: RangeInclusive<usize>,
    /// Largest weight; 1 keeps the instance unit-weighted.
    pub w_max: u64,
    pub half_width: RangeInclusive<u32>,
}

impl Default for Mix {
    fn default() -> Self {
        Self { n: 4..=10, d: 1..=3, k_out: 0..=3, k_mod: 0..=1, w_max: 3, half_width: 2..=6 }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A planted instance whose corruption may exceed its budgets by one, with
/// random weights and a random budget.
pub fn random_instance(seed: u64, mix: &Mix) -> WeightedInstance {
    let mut r = rng(seed);
    let n = r.gen_range(mix.n.clone());
    let d = r.gen_range(mix.d.clone());
    let k_out = r.gen_range(mix.k_out.clone());
    let k_mod = r.gen_range(mix.k_mod.clone());
    let planted_out = r.gen_range(0..=(k_out + 1).min(n - 1));
    let inliers = n - planted_out;
    let planted_mod = r.gen_range(0..=k_mod + 1).min(pair_count(inliers));
    let spec = PlantedSpec {
        half_width: r.gen_range(mix.half_width.clone()) as f64,
        noise: if r.gen_bool(0.5) { NoiseKind::Perturbed } else { NoiseKind::RandomInconsistent },
        ..PlantedSpec::new(n, d, planted_out, planted_mod, r.gen())
    };
    let (mut inst, _) = planted_instance(&spec).expect("valid spec");
    inst.k_out = k_out;
    inst.k_mod = k_mod;
    if mix.w_max > 1 {
        let w: Vec<u64> = (0..n).map(|_| r.gen_range(1..=mix.w_max)).collect();
        inst = inst.with_outlier_weights(w).expect("length n");
        for i in 0..n {
            for j in i + 1..n {
                inst.set_pair_weight(Pair(i, j), r.gen_range(1..=mix.w_max)).expect("pair in range");
            }
        }
    }
    if r.gen_bool(0.5) {
        let cap = ((k_out + k_mod) as u64 * mix.w_max).max(1);
        inst = inst.with_budget(r.gen_range(0..=cap));
    } else {
        let total = inst.total_weight();
        inst = inst.with_budget(total);
    }
    inst
}
