//! Sampled point sets with planted outliers and scrambled distances.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{brute_force_eeo, OracleBudget};
use crate::rng::rng_for;
use crate::space::{sq_norm_diff, DistanceSpace, Pair, Solution, WeightedInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    /// Outlier rows drawn uniformly from the range of genuine distances.
    RandomInconsistent,
    /// Outliers have a true position; each of their distances is shifted.
    Perturbed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedSpec {
    pub n: usize,
    pub d: usize,
    pub k_out_planted: usize,
    pub k_mod_planted: usize,
    /// Coordinates are drawn from `[-half_width, half_width]`.
    pub half_width: f64,
    pub noise: NoiseKind,
    /// Integer coordinates, so every squared distance is an integer.
    pub integral: bool,
    pub seed: u64,
}

impl PlantedSpec {
    pub fn new(n: usize, d: usize, k_out_planted: usize, k_mod_planted: usize, seed: u64) -> Self {
        Self {
            n,
            d,
            k_out_planted,
            k_mod_planted,
            half_width: 10.0,
            noise: NoiseKind::RandomInconsistent,
            integral: true,
            seed,
        }
    }

    fn check(&self) -> Result<()> {
        if self.n <= self.k_out_planted {
            return Err(Error::InvalidSpec(format!("n = {} must exceed k_out = {}", self.n, self.k_out_planted)));
        }
        if self.d == 0 {
            return Err(Error::ZeroDimension);
        }
        if !(self.half_width.is_finite() && self.half_width >= 1.0) {
            return Err(Error::InvalidSpec("half_width must be at least 1".into()));
        }
        let m = self.n - self.k_out_planted;
        if self.k_mod_planted > m * (m - 1) / 2 {
            return Err(Error::InvalidSpec("more scrambled pairs than surviving pairs".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedTruth {
    /// Planted outliers, and scrambled pairs mapped to their true values.
    pub solution: Solution,
    /// Sampled coordinates of the inliers (outliers have none).
    pub points: BTreeMap<usize, Vec<f64>>,
    /// The exhaustive oracle confirmed the planted cost is optimal; otherwise
    /// it is only an upper bound.
    pub optimal: bool,
    pub attempts: usize,
}

const MAX_ATTEMPTS: usize = 50;
/// Instances up to this size are checked against the exhaustive oracle.
const CONFIRM_UP_TO: usize = 10;

fn sample_point(rng: &mut ChaCha8Rng, spec: &PlantedSpec) -> Vec<f64> {
    (0..spec.d)
        .map(|_| {
            if spec.integral {
                let h = spec.half_width.floor() as i64;
                rng.gen_range(-h..=h) as f64
            } else {
                rng.gen_range(-spec.half_width..=spec.half_width)
            }
        })
        .collect()
}

fn sample_value(rng: &mut ChaCha8Rng, spec: &PlantedSpec, hi: f64) -> f64 {
    if spec.integral {
        rng.gen_range(0..=hi as i64) as f64
    } else {
        rng.gen_range(0.0..=hi)
    }
}

fn draw(spec: &PlantedSpec, attempt: usize) -> (WeightedInstance, PlantedTruth) {
    let mut rng = rng_for(spec.seed, &[attempt as u64]);
    let inliers = spec.n - spec.k_out_planted;
    let pts: Vec<Vec<f64>> = (0..spec.n).map(|_| sample_point(&mut rng, spec)).collect();
    let hi = 4.0 * spec.half_width.floor().powi(2) * spec.d as f64;
    let mut rows = vec![vec![0.0; spec.n]; spec.n];
    for i in 0..spec.n {
        for j in i + 1..spec.n {
            let truth = sq_norm_diff(&pts[i], &pts[j]);
            let v = if j < inliers {
                truth
            } else {
                match spec.noise {
                    NoiseKind::RandomInconsistent => sample_value(&mut rng, spec, hi),
                    NoiseKind::Perturbed => {
                        let shift = 1.0 + sample_value(&mut rng, spec, spec.half_width.powi(2));
                        if rng.gen_bool(0.5) && truth >= shift {
                            truth - shift
                        } else {
                            truth + shift
                        }
                    }
                }
            };
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    let mut pairs: Vec<Pair> = (0..inliers).flat_map(|i| (i + 1..inliers).map(move |j| Pair(i, j))).collect();
    pairs.shuffle(&mut rng);
    let mut modifications = BTreeMap::new();
    for &p in pairs.iter().take(spec.k_mod_planted) {
        let truth = rows[p.lo()][p.hi()];
        let mut v = sample_value(&mut rng, spec, hi);
        while v == truth {
            v = sample_value(&mut rng, spec, hi);
        }
        rows[p.lo()][p.hi()] = v;
        rows[p.hi()][p.lo()] = v;
        modifications.insert(p, truth);
    }
    let space = DistanceSpace::from_rows(&rows).expect("sampled rows are valid");
    let inst = WeightedInstance::unit(space, spec.d, spec.k_out_planted, spec.k_mod_planted).expect("d > 0");
    let outliers: BTreeSet<usize> = (inliers..spec.n).collect();
    let cost = (outliers.len() + modifications.len()) as u64;
    let solution = Solution { outliers, modifications, realization: None, cost };
    let points = pts.into_iter().enumerate().take(inliers).collect();
    (inst, PlantedTruth { solution, points, optimal: false, attempts: attempt + 1 })
}

/// Samples inliers, appends outlier rows, then scrambles surviving pairs.
/// Small outlier-only instances are redrawn until the oracle confirms that
/// every planted outlier is needed.
pub fn planted_instance(spec: &PlantedSpec) -> Result<(WeightedInstance, PlantedTruth)> {
    spec.check()?;
    let confirmable = spec.n <= CONFIRM_UP_TO && spec.k_mod_planted == 0;
    if !confirmable {
        return Ok(draw(spec, 0));
    }
    let mut first = None;
    for attempt in 0..MAX_ATTEMPTS {
        let (inst, mut truth) = draw(spec, attempt);
        let opt = brute_force_eeo(&inst, &OracleBudget::default())?.map(|s| s.cost);
        if opt == Some(truth.solution.cost) {
            truth.optimal = true;
            return Ok((inst, truth));
        }
        first.get_or_insert((inst, truth));
    }
    Ok(first.expect("at least one attempt"))
}
