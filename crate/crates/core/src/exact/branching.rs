//! Branching algorithms for weighted outlier deletion without modifications.
//!
//! Both searches explore every branch and keep the cheapest solution, with
//! ties broken by size and then lexicographically, so they return the same
//! optimum as exhaustive enumeration.

use std::collections::HashMap;

use crate::approx::obstruction_set;
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::space::{Solution, WeightedInstance};

type Found = Option<(u64, Vec<usize>)>;

fn key(f: &(u64, Vec<usize>)) -> (u64, usize, &[usize]) {
    (f.0, f.1.len(), &f.1)
}

fn keep_best(best: &mut Found, cand: (u64, Vec<usize>)) {
    if best.as_ref().is_none_or(|b| key(&cand) < key(b)) {
        *best = Some(cand);
    }
}

fn with(mut v: Vec<usize>, x: usize) -> Vec<usize> {
    v.push(x);
    v.sort_unstable();
    v
}

pub(crate) fn finish(geom: &Geometry, inst: &WeightedInstance, outliers: Vec<usize>) -> Solution {
    let mut sol = Solution::outliers_only(inst, outliers.into_iter().collect());
    sol.realization = geom.realize(&inst.space, &sol.survivors(inst.n()), inst.d);
    sol
}

fn require_outlier_only(inst: &WeightedInstance) -> Result<()> {
    if inst.k_mod != 0 {
        return Err(Error::ModificationsNotSupported(inst.k_mod));
    }
    Ok(())
}

struct Alg1<'a> {
    geom: &'a Geometry,
    inst: &'a WeightedInstance,
    memo: HashMap<Vec<usize>, Found>,
}

impl Alg1<'_> {
    /// Cheapest extra deletions making the residual embeddable, given the
    /// already deleted (sorted) set.
    fn go(&mut self, deleted: Vec<usize>, k: usize, w: u64) -> Found {
        if let Some(r) = self.memo.get(&deleted) {
            return r.clone();
        }
        let residual: Vec<usize> = (0..self.inst.n()).filter(|x| deleted.binary_search(x).is_err()).collect();
        let result = match obstruction_set(self.geom, &self.inst.space, &residual, self.inst.d) {
            None => Some((0, Vec::new())),
            Some(_) if k == 0 => None,
            Some(obs) => {
                let mut best = None;
                for x in obs {
                    let wx = self.inst.outlier_weight(x);
                    if wx > w {
                        continue;
                    }
                    if let Some((c, mut rest)) = self.go(with(deleted.clone(), x), k - 1, w - wx) {
                        rest = with(rest, x);
                        keep_best(&mut best, (c + wx, rest));
                    }
                }
                best
            }
        };
        self.memo.insert(deleted, result.clone());
        result
    }
}

/// Branches on the at most d+3 points of an obstruction set.
pub fn alg1_branch(geom: &Geometry, inst: &WeightedInstance) -> Result<Option<Solution>> {
    require_outlier_only(inst)?;
    let mut s = Alg1 { geom, inst, memo: HashMap::new() };
    Ok(s.go(Vec::new(), inst.k_out, inst.budget).map(|(_, o)| finish(geom, inst, o)))
}

/// Measure k + d + 1 − |Z| at a parent call and at one of its children.
pub type MeasureEdge = (isize, isize);

struct Alg2<'a> {
    geom: &'a Geometry,
    inst: &'a WeightedInstance,
    memo: HashMap<(Vec<usize>, Vec<usize>), Found>,
    trace: Option<Vec<MeasureEdge>>,
}

impl Alg2<'_> {
    fn measure(&self, k: isize, z: &[usize]) -> isize {
        k + self.inst.d as isize + 1 - z.len() as isize
    }

    fn emb(&self, pts: &[usize], r: isize) -> bool {
        self.geom.is_embeddable(&self.inst.space, pts, r)
    }

    fn child_delete(&mut self, deleted: &[usize], z: &[usize], k: isize, w: i128, x: usize) -> Found {
        let wx = self.inst.outlier_weight(x);
        let parent = self.measure(k, z);
        self.go(with(deleted.to_vec(), x), z.to_vec(), k - 1, w - wx as i128, Some(parent))
            .map(|(c, rest)| (c + wx, with(rest, x)))
    }

    fn go(&mut self, deleted: Vec<usize>, z: Vec<usize>, k: isize, w: i128, parent: Option<isize>) -> Found {
        let d = self.inst.d;
        let own = self.measure(k, &z);
        if let (Some(p), Some(t)) = (parent, self.trace.as_mut()) {
            t.push((p, own));
        }
        // line 1
        if k < 0 || w < 0 || z.len() > d + 1 {
            return None;
        }
        let memo_key = (deleted.clone(), z.clone());
        if let Some(r) = self.memo.get(&memo_key) {
            return r.clone();
        }
        let residual: Vec<usize> = (0..self.inst.n()).filter(|x| deleted.binary_search(x).is_err()).collect();
        let result = self.body(&deleted, &z, &residual, k, w);
        self.memo.insert(memo_key, result.clone());
        result
    }

    fn body(&mut self, deleted: &[usize], z: &[usize], residual: &[usize], k: isize, w: i128) -> Found {
        // line 2
        if self.emb(residual, self.inst.d as isize) {
            return Some((0, Vec::new()));
        }
        let outside: Vec<usize> = residual.iter().copied().filter(|x| !z.contains(x)).collect();
        let plus = |extra: &[usize]| {
            let mut v = z.to_vec();
            v.extend_from_slice(extra);
            v
        };
        // line 3: forced deletion
        if let Some(&x) = outside.iter().find(|&&x| !self.emb(&plus(&[x]), z.len() as isize)) {
            return self.child_delete(deleted, z, k, w, x);
        }
        // line 4: delete z or make it part of Z
        let indep = outside
            .iter()
            .copied()
            .find(|&x| self.geom.is_independent(&self.inst.space, &plus(&[x])).unwrap_or(false));
        if let Some(x) = indep {
            let mut best = self.child_delete(deleted, z, k, w, x);
            let parent = self.measure(k, z);
            if let Some(f) = self.go(deleted.to_vec(), plus(&[x]), k, w, Some(parent)) {
                keep_best(&mut best, f);
            }
            return best;
        }
        // line 5: a single point or a pair that does not fit in dimension |Z|−1
        let r = z.len() as isize - 1;
        let mut witness = outside.iter().find(|&&x| !self.emb(&plus(&[x]), r)).map(|&x| (x, x));
        if witness.is_none() {
            'outer: for (i, &x) in outside.iter().enumerate() {
                for &y in &outside[i + 1..] {
                    if !self.emb(&plus(&[x, y]), r) {
                        witness = Some((x, y));
                        break 'outer;
                    }
                }
            }
        }
        let (x, y) = witness?;
        let mut best = self.child_delete(deleted, z, k, w, x);
        if y != x {
            if let Some(f) = self.child_delete(deleted, z, k, w, y) {
                keep_best(&mut best, f);
            }
        }
        best
    }
}

fn check_independent(geom: &Geometry, inst: &WeightedInstance, z: &[usize]) -> Result<()> {
    for &p in z {
        if p >= inst.n() {
            return Err(Error::UnknownPoint(p));
        }
    }
    if !z.is_empty() && !geom.is_independent(&inst.space, z)? {
        return Err(Error::NotIndependent);
    }
    Ok(())
}

/// Cheapest solution disjoint from the independent set `z`.
pub fn alg2_branch(geom: &Geometry, inst: &WeightedInstance, z: &[usize]) -> Result<Option<Solution>> {
    Ok(alg2_traced(geom, inst, z, false)?.0)
}

/// Like [`alg2_branch`], optionally recording the measure along every
/// recursive edge.
pub fn alg2_traced(
    geom: &Geometry,
    inst: &WeightedInstance,
    z: &[usize],
    record: bool,
) -> Result<(Option<Solution>, Vec<MeasureEdge>)> {
    require_outlier_only(inst)?;
    check_independent(geom, inst, z)?;
    let mut s = Alg2 { geom, inst, memo: HashMap::new(), trace: record.then(Vec::new) };
    let found = s.go(Vec::new(), z.to_vec(), inst.k_out as isize, inst.budget as i128, None);
    let trace = s.trace.take().unwrap_or_default();
    Ok((found.map(|(_, o)| finish(geom, inst, o)), trace))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EeoAlgorithm {
    Alg1,
    Alg2,
}

/// Alg-1 when (d+3)^k ≤ 2^(d+k), otherwise Alg-2.
pub fn eeo_dispatch(d: usize, k: usize) -> EeoAlgorithm {
    let lhs = k as f64 * ((d + 3) as f64).log2();
    let rhs = (d + k) as f64;
    if lhs <= rhs + 1e-12 {
        EeoAlgorithm::Alg1
    } else {
        EeoAlgorithm::Alg2
    }
}

pub fn solve_eeo(geom: &Geometry, inst: &WeightedInstance) -> Result<Option<Solution>> {
    match eeo_dispatch(inst.d, inst.k_out) {
        EeoAlgorithm::Alg1 => alg1_branch(geom, inst),
        EeoAlgorithm::Alg2 => alg2_branch(geom, inst, &[]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::DistanceSpace;

    fn bad_triangle(k: usize) -> WeightedInstance {
        let s = DistanceSpace::from_rows(&[vec![0.0, 1.0, 9.0], vec![1.0, 0.0, 1.0], vec![9.0, 1.0, 0.0]]).unwrap();
        WeightedInstance::unit(s, 1, k, 0).unwrap().with_budget(1)
    }

    #[test]
    fn dispatch_arithmetic() {
        assert_eq!(eeo_dispatch(1, 5), EeoAlgorithm::Alg2);
        assert_eq!(eeo_dispatch(10, 1), EeoAlgorithm::Alg1);
    }

    #[test]
    fn triangle_needs_one_deletion() {
        let g = Geometry::default();
        for f in [alg1_branch, |g: &Geometry, i: &WeightedInstance| alg2_branch(g, i, &[])] {
            let sol = f(&g, &bad_triangle(1)).unwrap().unwrap();
            assert_eq!(sol.cost, 1);
            assert!(f(&g, &bad_triangle(0)).unwrap().is_none());
        }
    }

    #[test]
    fn weights_pick_the_cheap_point() {
        let g = Geometry::default();
        let inst = bad_triangle(1).with_budget(10).with_outlier_weights(vec![3, 2, 3]).unwrap();
        let a = alg1_branch(&g, &inst).unwrap().unwrap();
        let b = alg2_branch(&g, &inst, &[]).unwrap().unwrap();
        assert_eq!(a.outliers, [1].into());
        assert_eq!(a.outliers, b.outliers);
    }

    #[test]
    fn rejects_modifications_and_dependent_seed() {
        let g = Geometry::default();
        let s = DistanceSpace::from_points(&[vec![0.0], vec![0.0]]);
        let inst = WeightedInstance::unit(s.clone(), 1, 0, 1).unwrap();
        assert_eq!(alg1_branch(&g, &inst), Err(Error::ModificationsNotSupported(1)));
        let inst = WeightedInstance::unit(s, 1, 0, 0).unwrap();
        assert_eq!(alg2_branch(&g, &inst, &[0, 1]), Err(Error::NotIndependent));
    }

    #[test]
    fn measure_decreases() {
        let g = Geometry::default();
        let pts: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![2.0, 5.0]];
        let inst = WeightedInstance::unit(DistanceSpace::from_points(&pts), 1, 3, 0).unwrap();
        let (sol, trace) = alg2_traced(&g, &inst, &[], true).unwrap();
        assert!(sol.is_some());
        assert!(!trace.is_empty());
        assert!(trace.iter().all(|(p, c)| c < p));
    }
}
