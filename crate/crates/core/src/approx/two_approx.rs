//! Randomized 2-approximation for unweighted outlier deletion.
//!
//! Each trial grows a random independent set U one level at a time. At level
//! i the points outside U split into three classes relative to U:
//! defective (U ∪ {y} does not embed in R^d′ at all), compatible
//! (U ∪ {y} embeds in dimension i−2), and the rest. A vertex cover of the
//! compatible points' conflict graph, together with the other two classes,
//! is a candidate outlier set.

use std::collections::BTreeSet;

use rand::Rng;
use rayon::prelude::*;

use super::vertex_cover::vertex_cover_2approx;
use crate::geometry::Geometry;
use crate::rng::rng_for;
use crate::space::DistanceSpace;

/// Classes at one level of the sieve.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SieveState {
    pub level: usize,
    pub u: Vec<usize>,
    pub comp: BTreeSet<usize>,
    pub def: BTreeSet<usize>,
    pub incomp: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    pub sieve: SieveState,
    pub edges: Vec<(usize, usize)>,
    pub cover: BTreeSet<usize>,
    /// `Q ∪ C_incomp ∪ C_def`, kept only if its complement embeds in R^d.
    pub candidate: Option<BTreeSet<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub d_prime: usize,
    pub trial: usize,
    pub levels: Vec<LevelRecord>,
    pub best: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoApproxTrace {
    pub trials: Vec<TrialRecord>,
    pub best: BTreeSet<usize>,
}

pub fn default_trials(d: usize) -> usize {
    1usize << (d + 1).min(40)
}

fn better(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> bool {
    (a.len(), a.iter().collect::<Vec<_>>()) < (b.len(), b.iter().collect::<Vec<_>>())
}

/// Classifies the points outside `u` at level `level` for guess `d_prime`.
pub fn sieve(geom: &Geometry, space: &DistanceSpace, u: &[usize], level: usize, d_prime: usize) -> SieveState {
    let mut st = SieveState { level, u: u.to_vec(), ..Default::default() };
    for y in (0..space.len()).filter(|y| !u.contains(y)) {
        let mut s = u.to_vec();
        s.push(y);
        if !geom.is_embeddable(space, &s, d_prime as isize) {
            st.def.insert(y);
        } else if geom.is_embeddable(space, &s, level as isize - 2) {
            st.comp.insert(y);
        } else {
            st.incomp.insert(y);
        }
    }
    st
}

/// One run of the sieve for a fixed guess `d_prime`.
pub fn run_trial(
    geom: &Geometry,
    space: &DistanceSpace,
    d: usize,
    d_prime: usize,
    seed: u64,
    trial: usize,
) -> TrialRecord {
    let n = space.len();
    let mut rng = rng_for(seed, &[d_prime as u64, trial as u64]);
    let mut u: Vec<usize> = Vec::new();
    let mut levels = Vec::new();
    let mut best: BTreeSet<usize> = (0..n).collect();
    for level in 1..=d_prime + 2 {
        let st = sieve(geom, space, &u, level, d_prime);
        let comp: Vec<usize> = st.comp.iter().copied().collect();
        let mut edges = Vec::new();
        for (a, &x) in comp.iter().enumerate() {
            for &y in &comp[a + 1..] {
                let mut s = u.clone();
                s.extend([x, y]);
                if !geom.is_embeddable(space, &s, level as isize - 2) {
                    edges.push((x, y));
                }
            }
        }
        let cover = vertex_cover_2approx(&edges);
        let a: BTreeSet<usize> = cover.iter().chain(&st.incomp).chain(&st.def).copied().collect();
        let rest: Vec<usize> = (0..n).filter(|x| !a.contains(x)).collect();
        let candidate = geom.is_embeddable(space, &rest, d as isize).then_some(a);
        if let Some(c) = &candidate {
            if better(c, &best) {
                best = c.clone();
            }
        }
        let pick = (!st.incomp.is_empty()).then(|| {
            let k = rng.gen_range(0..st.incomp.len());
            *st.incomp.iter().nth(k).expect("index in range")
        });
        levels.push(LevelRecord { sieve: st, edges, cover, candidate });
        match pick {
            Some(x) => u.push(x),
            None => break,
        }
    }
    TrialRecord { d_prime, trial, levels, best }
}

/// Full search over guesses d′ = 1..=d and `trials` seeded trials each.
pub fn two_approx_trace(
    geom: &Geometry,
    space: &DistanceSpace,
    d: usize,
    seed: u64,
    trials: usize,
) -> TwoApproxTrace {
    let jobs: Vec<(usize, usize)> = (1..=d).flat_map(|dp| (0..trials.max(1)).map(move |t| (dp, t))).collect();
    let records: Vec<TrialRecord> =
        jobs.par_iter().map(|&(dp, t)| run_trial(geom, space, d, dp, seed, t)).collect();
    let mut best: BTreeSet<usize> = (0..space.len()).collect();
    if geom.is_embeddable(space, &space.points(), d as isize) {
        best.clear();
    }
    for r in &records {
        if better(&r.best, &best) {
            best = r.best.clone();
        }
    }
    TwoApproxTrace { trials: records, best }
}

/// Outlier set whose removal leaves a d-embeddable space; at most twice the
/// optimum with probability ≥ 1 − 1/e at the default trial count.
pub fn two_approx_outliers(
    geom: &Geometry,
    space: &DistanceSpace,
    d: usize,
    seed: u64,
    trials: Option<usize>,
) -> BTreeSet<usize> {
    let trials = trials.unwrap_or_else(|| default_trials(d));
    two_approx_trace(geom, space, d, seed, trials).best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bad_triangle() -> DistanceSpace {
        DistanceSpace::from_rows(&[vec![0.0, 1.0, 9.0], vec![1.0, 0.0, 1.0], vec![9.0, 1.0, 0.0]]).unwrap()
    }

    #[test]
    fn embeddable_gives_empty() {
        let g = Geometry::default();
        let s = DistanceSpace::from_points(&[vec![0.0, 0.0], vec![3.0, 1.0], vec![2.0, 2.0]]);
        assert!(two_approx_outliers(&g, &s, 2, 1, None).is_empty());
    }

    #[test]
    fn triangle_violation() {
        let g = Geometry::default();
        let s = bad_triangle();
        let a = two_approx_outliers(&g, &s, 1, 5, None);
        assert!(!a.is_empty() && a.len() <= 2);
        let rest: Vec<usize> = (0..3).filter(|x| !a.contains(x)).collect();
        assert!(g.is_embeddable(&s, &rest, 1));
    }

    #[test]
    fn first_level_takes_everything() {
        let g = Geometry::default();
        let rec = run_trial(&g, &bad_triangle(), 1, 1, 0, 0);
        let l1 = &rec.levels[0];
        assert!(l1.sieve.comp.is_empty() && l1.sieve.def.is_empty());
        assert_eq!(l1.sieve.incomp.len(), 3);
    }

    #[test]
    fn sieve_partitions_the_points() {
        let g = Geometry::default();
        let s = bad_triangle();
        for rec in two_approx_trace(&g, &s, 2, 3, 4).trials {
            for l in rec.levels {
                let mut all: Vec<usize> = l.sieve.u.clone();
                all.extend(&l.sieve.comp);
                all.extend(&l.sieve.def);
                all.extend(&l.sieve.incomp);
                all.sort();
                assert_eq!(all, vec![0, 1, 2]);
            }
        }
    }

    #[test]
    fn reproducible() {
        let g = Geometry::default();
        let s = bad_triangle();
        assert_eq!(two_approx_outliers(&g, &s, 1, 7, Some(1)), two_approx_outliers(&g, &s, 1, 7, Some(1)));
    }
}
