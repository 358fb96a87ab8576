//! Brute-force references for small instances.
//!
//! Everything here enumerates the problem definition directly and refuses
//! inputs beyond an [`OracleBudget`]. Integral inputs are decided with the
//! exact rational backend.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::weeo;
use crate::geometry::{Backend, Geometry};
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::space::{DistanceSpace, Solution, WeightedInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_points: usize,
    pub max_subsets: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self { max_points: 12, max_subsets: 10_000_000 }
    }
}

impl OracleBudget {
    fn admit(&self, n: usize) -> Result<()> {
        if self.max_points == 0 || self.max_subsets == 0 {
            return Err(Error::InvalidSpec("oracle caps must be positive".into()));
        }
        if n > self.max_points {
            return Err(Error::TooLarge(format!("{n} points exceed the oracle cap {}", self.max_points)));
        }
        Ok(())
    }
}

/// Restarts the weighted oracle hands to the numeric feasibility search.
pub const ORACLE_RESTARTS: usize = 100;

const MAX_GRAPH: usize = 20;

/// Exact backend when every squared distance is an integer, float otherwise.
pub fn oracle_geometry(space: &DistanceSpace) -> Geometry {
    let n = space.len();
    let integral = (0..n).all(|i| (i + 1..n).all(|j| space.sq(i, j).fract() == 0.0 && space.sq(i, j) < 9.0e15));
    if integral {
        Geometry::exact()
    } else {
        Geometry::default()
    }
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k.min(n));
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn subsets_upto_count(n: usize, k: usize) -> usize {
    (0..=k.min(n)).fold(0usize, |acc, s| acc.saturating_add(binomial(n, s)))
}

/// Subsets of `0..n` with at most `k` elements, as sorted vectors.
fn subsets_upto(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..k.min(n) {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l| l + 1);
            for i in start..n {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Cheapest outlier set (by cost, size, then lexicographic order) within
/// `k_out` and the budget whose removal leaves a d-embeddable space.
/// Modification budgets are ignored.
pub fn brute_force_eeo(inst: &WeightedInstance, budget: &OracleBudget) -> Result<Option<Solution>> {
    let n = inst.n();
    budget.admit(n)?;
    let count = subsets_upto_count(n, inst.k_out);
    if count > budget.max_subsets {
        return Err(Error::TooLarge(format!("{count} outlier subsets")));
    }
    let geom = oracle_geometry(&inst.space);
    let mut cands: Vec<(u64, Vec<usize>)> = subsets_upto(n, inst.k_out)
        .into_iter()
        .map(|s| (s.iter().map(|&i| inst.outlier_weight(i)).sum(), s))
        .filter(|(c, _)| *c <= inst.budget)
        .collect();
    cands.sort_by(|a, b| (a.0, a.1.len(), &a.1).cmp(&(b.0, b.1.len(), &b.1)));
    let found = cands.par_iter().find_first(|(_, s)| {
        let keep: Vec<usize> = (0..n).filter(|i| !s.contains(i)).collect();
        geom.is_embeddable(&inst.space, &keep, inst.d as isize)
    });
    Ok(found.map(|(cost, s)| {
        let mut sol = Solution { outliers: s.iter().copied().collect(), cost: *cost, ..Solution::default() };
        let keep = sol.survivors(n);
        sol.realization = Geometry::new(geom.tol, Backend::Float).realize(&inst.space, &keep, inst.d);
        sol
    }))
}

/// Cheapest (outlier set, modified pairs) combination within all budgets.
/// Each modified-pair set is decided by the free-pair feasibility backend
/// with [`ORACLE_RESTARTS`] restarts.
pub fn brute_force_weeo(inst: &WeightedInstance, budget: &OracleBudget) -> Result<Option<Solution>> {
    brute_force_weeo_seeded(inst, budget, 0)
}

pub fn brute_force_weeo_seeded(inst: &WeightedInstance, budget: &OracleBudget, seed: u64) -> Result<Option<Solution>> {
    budget.admit(inst.n())?;
    let geom = oracle_geometry(&inst.space);
    let (found, _) = weeo::search(&geom, inst, seed, ORACLE_RESTARTS, budget.max_subsets)?;
    Ok(found.map(|(mut sol, _)| {
        if let Ok(rep) = inst.space.apply_modifications(&sol.modifications) {
            sol.realization = Geometry::new(geom.tol, Backend::Float).realize(&rep, &sol.survivors(inst.n()), inst.d);
        }
        sol
    }))
}

/// Every inclusion-minimal d-outlier set, in order of size then lexicographic.
pub fn minimal_outlier_sets(space: &DistanceSpace, d: usize, budget: &OracleBudget) -> Result<Vec<BTreeSet<usize>>> {
    let n = space.len();
    budget.admit(n)?;
    if n >= usize::BITS as usize || (1usize << n) > budget.max_subsets {
        return Err(Error::TooLarge(format!("2^{n} subsets")));
    }
    let geom = oracle_geometry(space);
    let mut found: Vec<BTreeSet<usize>> = Vec::new();
    for s in subsets_upto(n, n) {
        let set: BTreeSet<usize> = s.iter().copied().collect();
        if found.iter().any(|f| f.is_subset(&set)) {
            continue;
        }
        let keep: Vec<usize> = (0..n).filter(|i| !set.contains(i)).collect();
        if geom.is_embeddable(space, &keep, d as isize) {
            found.push(set);
        }
    }
    Ok(found)
}

/// Minimum-cardinality d-outlier sets.
pub fn optimal_outlier_sets(space: &DistanceSpace, d: usize, budget: &OracleBudget) -> Result<Vec<BTreeSet<usize>>> {
    let all = minimal_outlier_sets(space, d, budget)?;
    let best = all.iter().map(BTreeSet::len).min().unwrap_or(0);
    Ok(all.into_iter().filter(|s| s.len() == best).collect())
}

fn admit_graph(g: &Graph) -> Result<()> {
    if g.n() > MAX_GRAPH {
        return Err(Error::TooLarge(format!("{} vertices exceed {MAX_GRAPH}", g.n())));
    }
    Ok(())
}

/// Minimum vertex cover; the lexicographically first among those of
/// minimum size.
pub fn brute_force_vertex_cover(g: &Graph) -> Result<BTreeSet<usize>> {
    admit_graph(g)?;
    for s in subsets_upto(g.n(), g.n()) {
        if g.edges().iter().all(|&(a, b)| s.contains(&a) || s.contains(&b)) {
            return Ok(s.into_iter().collect());
        }
    }
    unreachable!("the full vertex set covers every edge")
}

/// Maximum number of edges crossing a bipartition.
pub fn brute_force_maxcut(g: &Graph) -> Result<usize> {
    admit_graph(g)?;
    let n = g.n();
    if n == 0 {
        return Ok(0);
    }
    // vertex n-1 stays on one side, halving the search
    Ok((0u32..1 << (n - 1))
        .into_par_iter()
        .map(|mask| g.edges().iter().filter(|&&(a, b)| (mask >> a & 1) != (mask >> b & 1)).count())
        .max()
        .unwrap_or(0))
}

/// Exact rank over the rationals.
pub fn rational_rank(m: &[Vec<f64>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = m.iter().map(|r| r.iter().map(|&v| BigRational::from_f64(v)).collect()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in 0..a.len() {
            if r != rank && !a[r][c].is_zero() {
                let f = a[r][c].clone() / a[rank][c].clone();
                for k in c..cols {
                    let t = f.clone() * a[rank][k].clone();
                    a[r][k] = a[r][k].clone() - t;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Whether deleting at most `k` columns lowers the rank by at least `h`.
pub fn brute_force_column_deletion(m: &[Vec<f64>], h: usize, k: usize) -> Result<bool> {
    let cols = m.first().map_or(0, Vec::len);
    if cols > MAX_GRAPH {
        return Err(Error::TooLarge(format!("{cols} columns exceed {MAX_GRAPH}")));
    }
    let full = rational_rank(m);
    Ok(subsets_upto(cols, k).into_iter().any(|del| {
        let sub: Vec<Vec<f64>> = m
            .iter()
            .map(|r| r.iter().enumerate().filter(|(j, _)| !del.contains(j)).map(|(_, &v)| v).collect())
            .collect();
        full.saturating_sub(rational_rank(&sub)) >= h
    }))
}
