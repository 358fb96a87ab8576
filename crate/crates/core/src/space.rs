//! Distance spaces, weighted instances, and candidate solutions.
//!
//! All distances are stored squared. Point identity is the row index; labels
//! are carried along for I/O only.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Geometry, Realization};

/// Unordered pair of distinct point indices, stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair(pub usize, pub usize);

impl Pair {
    pub fn new(a: usize, b: usize) -> Result<Pair> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Pair(a, b)),
            std::cmp::Ordering::Greater => Ok(Pair(b, a)),
            std::cmp::Ordering::Equal => Err(Error::DegeneratePair(a)),
        }
    }

    pub fn lo(&self) -> usize {
        self.0
    }

    pub fn hi(&self) -> usize {
        self.1
    }

    pub fn touches(&self, p: usize) -> bool {
        self.0 == p || self.1 == p
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}

/// First violated invariant of a raw squared-distance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    NotSquare { row: usize, len: usize, expected: usize },
    NonFinite { i: usize, j: usize },
    NonzeroDiagonal { i: usize },
    Negative { i: usize, j: usize },
    Asymmetric { i: usize, j: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSquare { row, len, expected } => {
                write!(f, "row {row} has {len} entries, expected {expected}")
            }
            Violation::NonFinite { i, j } => write!(f, "non-finite entry at ({i},{j})"),
            Violation::NonzeroDiagonal { i } => write!(f, "nonzero diagonal at {i}"),
            Violation::Negative { i, j } => write!(f, "negative entry at ({i},{j})"),
            Violation::Asymmetric { i, j } => write!(f, "asymmetric at ({i},{j})"),
        }
    }
}

/// Checks a raw matrix row by row and reports the first problem found.
pub fn validate(rows: &[Vec<f64>]) -> std::result::Result<(), Violation> {
    let n = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Violation::NotSquare { row: i, len: row.len(), expected: n });
        }
    }
    for i in 0..n {
        for j in 0..n {
            let v = rows[i][j];
            if !v.is_finite() {
                return Err(Violation::NonFinite { i, j });
            }
            if i == j {
                if v != 0.0 {
                    return Err(Violation::NonzeroDiagonal { i });
                }
                continue;
            }
            if v < 0.0 {
                return Err(Violation::Negative { i, j });
            }
            if j > i && rows[j][i] != v {
                return Err(Violation::Asymmetric { i, j });
            }
        }
    }
    Ok(())
}

/// A finite distance space given by its squared-distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSpace {
    labels: Vec<String>,
    sq: Vec<f64>,
    n: usize,
}

impl DistanceSpace {
    /// Builds a space with labels `"0"`, `"1"`, ... from validated rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let labels = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::with_labels(labels, rows)
    }

    pub fn with_labels(labels: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        validate(rows).map_err(Error::InvalidSpace)?;
        let n = rows.len();
        if labels.len() != n {
            return Err(Error::WeightLength { expected: n, got: labels.len() });
        }
        let sq = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Ok(Self { labels, sq, n })
    }

    /// Squared distances of a point list in coordinates.
    pub fn from_points(points: &[Vec<f64>]) -> Self {
        let n = points.len();
        let mut sq = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = sq_norm_diff(&points[i], &points[j]);
                sq[i * n + j] = v;
                sq[j * n + i] = v;
            }
        }
        Self { labels: (0..n).map(|i| i.to_string()).collect(), sq, n }
    }

    pub fn empty() -> Self {
        Self { labels: Vec::new(), sq: Vec::new(), n: 0 }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn sq(&self, i: usize, j: usize) -> f64 {
        self.sq[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.sq.chunks(self.n.max(1)).take(self.n).map(|c| c.to_vec()).collect()
    }

    pub fn points(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    /// Largest squared distance among the given points.
    pub fn max_sq_among(&self, pts: &[usize]) -> f64 {
        let mut m = 0.0f64;
        for (a, &i) in pts.iter().enumerate() {
            for &j in &pts[a + 1..] {
                m = m.max(self.sq(i, j));
            }
        }
        m
    }

    pub fn max_sq(&self) -> f64 {
        self.sq.iter().copied().fold(0.0, f64::max)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::UnknownPoint(i))
        }
    }

    /// Induced subspace on the points not in `delete`, in increasing index order.
    pub fn restrict(&self, delete: &BTreeSet<usize>) -> Result<DistanceSpace> {
        for &i in delete {
            self.check_index(i)?;
        }
        let keep: Vec<usize> = (0..self.n).filter(|i| !delete.contains(i)).collect();
        Ok(self.induced(&keep))
    }

    /// Induced subspace on `keep` (in the given order). Indices must be valid.
    pub fn induced(&self, keep: &[usize]) -> DistanceSpace {
        let m = keep.len();
        let mut sq = vec![0.0; m * m];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                sq[a * m + b] = self.sq(i, j);
            }
        }
        DistanceSpace {
            labels: keep.iter().map(|&i| self.labels[i].clone()).collect(),
            sq,
            n: m,
        }
    }

    /// Copy of the space with the listed pairs rewritten (both symmetric entries).
    pub fn apply_modifications(&self, mods: &BTreeMap<Pair, f64>) -> Result<DistanceSpace> {
        let mut out = self.clone();
        for (&Pair(i, j), &v) in mods {
            if i == j {
                return Err(Error::DegeneratePair(i));
            }
            self.check_index(i)?;
            self.check_index(j)?;
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::NegativeDistance { i, j, value: v });
            }
            out.sq[i * self.n + j] = v;
            out.sq[j * self.n + i] = v;
        }
        Ok(out)
    }

    /// Multiplies every squared distance by `c`.
    pub fn scaled(&self, c: f64) -> DistanceSpace {
        let mut out = self.clone();
        for v in &mut out.sq {
            *v *= c;
        }
        out
    }

    pub fn relabel(mut self, labels: Vec<String>) -> Result<DistanceSpace> {
        if labels.len() != self.n {
            return Err(Error::WeightLength { expected: self.n, got: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }
}

pub(crate) fn sq_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Number of unordered pairs on `n` points.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn pair_slot(n: usize, Pair(i, j): Pair) -> usize {
    // row-major over the strict upper triangle
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Distance space plus budgets and integer weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedInstance {
    pub space: DistanceSpace,
    pub d: usize,
    pub k_out: usize,
    pub k_mod: usize,
    pub budget: u64,
    w_out: Vec<u64>,
    w_mod: Vec<u64>,
}

impl WeightedInstance {
    /// Unit weights and an unconstrained weight budget.
    pub fn unit(space: DistanceSpace, d: usize, k_out: usize, k_mod: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        let n = space.len();
        let budget = (n + pair_count(n)) as u64;
        Ok(Self { space, d, k_out, k_mod, budget, w_out: vec![1; n], w_mod: vec![1; pair_count(n)] })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_outlier_weights(mut self, w: Vec<u64>) -> Result<Self> {
        if w.len() != self.space.len() {
            return Err(Error::WeightLength { expected: self.space.len(), got: w.len() });
        }
        self.w_out = w;
        Ok(self)
    }

    pub fn set_pair_weight(&mut self, pair: Pair, w: u64) -> Result<()> {
        if pair.hi() >= self.space.len() {
            return Err(Error::UnknownPoint(pair.hi()));
        }
        let slot = pair_slot(self.space.len(), pair);
        self.w_mod[slot] = w;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.space.len()
    }

    pub fn outlier_weight(&self, i: usize) -> u64 {
        self.w_out[i]
    }

    pub fn outlier_weights(&self) -> &[u64] {
        &self.w_out
    }

    pub fn pair_weight(&self, pair: Pair) -> u64 {
        self.w_mod[pair_slot(self.space.len(), pair)]
    }

    /// Sum of every weight; the default budget when none is given.
    pub fn total_weight(&self) -> u64 {
        self.w_out.iter().sum::<u64>() + self.w_mod.iter().sum::<u64>()
    }

    pub fn is_unit_weighted(&self) -> bool {
        self.w_out.iter().all(|&w| w == 1) && self.w_mod.iter().all(|&w| w == 1)
    }

    /// Pairs whose weight differs from 1, for compact serialization.
    pub fn non_unit_pair_weights(&self) -> Vec<(Pair, u64)> {
        let n = self.space.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let w = self.pair_weight(Pair(i, j));
                if w != 1 {
                    out.push((Pair(i, j), w));
                }
            }
        }
        out
    }

    /// Instance induced on `keep`, with weights carried over and budgets unchanged.
    pub fn sub_instance(&self, keep: &[usize]) -> WeightedInstance {
        let space = self.space.induced(keep);
        let m = keep.len();
        let mut w_mod = vec![1; pair_count(m)];
        for a in 0..m {
            for b in a + 1..m {
                let orig = Pair::new(keep[a], keep[b]).expect("distinct indices");
                w_mod[pair_slot(m, Pair(a, b))] = self.pair_weight(orig);
            }
        }
        WeightedInstance {
            space,
            d: self.d,
            k_out: self.k_out,
            k_mod: self.k_mod,
            budget: self.budget,
            w_out: keep.iter().map(|&i| self.w_out[i]).collect(),
            w_mod,
        }
    }
}

/// Outlier set, distance modifications, and an optional witness realization.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Solution {
    pub outliers: BTreeSet<usize>,
    pub modifications: BTreeMap<Pair, f64>,
    pub realization: Option<Realization>,
    pub cost: u64,
}

impl Solution {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn outliers_only(instance: &WeightedInstance, outliers: BTreeSet<usize>) -> Self {
        let mut s = Solution { outliers, ..Default::default() };
        s.cost = solution_cost(instance, &s);
        s
    }

    /// Sort key used for deterministic tie-breaking among optimal answers.
    pub fn order_key(&self) -> (u64, usize, Vec<usize>, Vec<Pair>) {
        (
            self.cost,
            self.outliers.len() + self.modifications.len(),
            self.outliers.iter().copied().collect(),
            self.modifications.keys().copied().collect(),
        )
    }

    /// Surviving points in increasing order.
    pub fn survivors(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|i| !self.outliers.contains(i)).collect()
    }
}

pub fn solution_cost(instance: &WeightedInstance, sol: &Solution) -> u64 {
    let o: u64 = sol.outliers.iter().map(|&i| instance.outlier_weight(i)).sum();
    let m: u64 = sol.modifications.keys().map(|&p| instance.pair_weight(p)).sum();
    o + m
}

/// Why a claimed solution was rejected.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("{0} outliers exceed k_out = {1}")]
    TooManyOutliers(usize, usize),
    #[error("{0} modifications exceed k_mod = {1}")]
    TooManyModifications(usize, usize),
    #[error("cost {0} exceeds budget {1}")]
    OverBudget(u64, u64),
    #[error("recorded cost {recorded} differs from weight total {actual}")]
    CostMismatch { recorded: u64, actual: u64 },
    #[error("modified pair {0} touches an outlier")]
    PairTouchesOutlier(Pair),
    #[error("invalid solution entry: {0}")]
    Invalid(Error),
    #[error("repaired space is not {0}-embeddable")]
    NotEmbeddable(usize),
    #[error("realization does not reproduce the repaired distances")]
    BadRealization,
}

/// Checks budgets, cost accounting, the `D ⊆ (X∖O)^(2)` convention, and
/// embeddability of the repaired space (plus the witness, if present).
pub fn verify_solution(
    geom: &Geometry,
    instance: &WeightedInstance,
    sol: &Solution,
) -> std::result::Result<(), VerifyError> {
    let n = instance.n();
    for &o in &sol.outliers {
        if o >= n {
            return Err(VerifyError::Invalid(Error::UnknownPoint(o)));
        }
    }
    if sol.outliers.len() > instance.k_out {
        return Err(VerifyError::TooManyOutliers(sol.outliers.len(), instance.k_out));
    }
    if sol.modifications.len() > instance.k_mod {
        return Err(VerifyError::TooManyModifications(sol.modifications.len(), instance.k_mod));
    }
    for p in sol.modifications.keys() {
        if sol.outliers.contains(&p.lo()) || sol.outliers.contains(&p.hi()) {
            return Err(VerifyError::PairTouchesOutlier(*p));
        }
    }
    let repaired = instance.space.apply_modifications(&sol.modifications).map_err(VerifyError::Invalid)?;
    let actual = solution_cost(instance, sol);
    if actual != sol.cost {
        return Err(VerifyError::CostMismatch { recorded: sol.cost, actual });
    }
    if actual > instance.budget {
        return Err(VerifyError::OverBudget(actual, instance.budget));
    }
    let survivors = sol.survivors(n);
    if !geom.is_embeddable(&repaired, &survivors, instance.d as isize) {
        return Err(VerifyError::NotEmbeddable(instance.d));
    }
    if let Some(real) = &sol.realization {
        if !real.reproduces(&repaired, &survivors, geom.tol.eps_dist) {
            return Err(VerifyError::BadRealization);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq2(a: f64) -> Vec<Vec<f64>> {
        vec![vec![0.0, a], vec![a, 0.0]]
    }

    #[test]
    fn validate_examples() {
        assert_eq!(validate(&sq2(4.0)), Ok(()));
        assert_eq!(
            validate(&[vec![0.0, 4.0], vec![3.0, 0.0]]),
            Err(Violation::Asymmetric { i: 0, j: 1 })
        );
        assert_eq!(
            validate(&[vec![1.0, 4.0], vec![4.0, 0.0]]),
            Err(Violation::NonzeroDiagonal { i: 0 })
        );
        assert_eq!(
            validate(&[vec![0.0, -1.0], vec![-1.0, 0.0]]),
            Err(Violation::Negative { i: 0, j: 1 })
        );
        assert!(matches!(validate(&[vec![0.0, 1.0]]), Err(Violation::NotSquare { .. })));
    }

    #[test]
    fn zero_off_diagonal_is_allowed() {
        assert!(DistanceSpace::from_rows(&sq2(0.0)).is_ok());
    }

    #[test]
    fn restrict_edge_cases() {
        let s = DistanceSpace::from_points(&[vec![0.0], vec![1.0], vec![3.0]]);
        assert_eq!(s.restrict(&BTreeSet::new()).unwrap(), s);
        let all: BTreeSet<usize> = (0..3).collect();
        assert!(s.restrict(&all).unwrap().is_empty());
        assert_eq!(s.restrict(&[7].into()), Err(Error::UnknownPoint(7)));
        let r = s.restrict(&[1].into()).unwrap();
        assert_eq!(r.labels(), &["0".to_string(), "2".to_string()]);
        assert_eq!(r.sq(0, 1), 9.0);
    }

    #[test]
    fn modification_errors_and_effect() {
        let s = DistanceSpace::from_points(&[vec![0.0], vec![1.0], vec![3.0]]);
        assert_eq!(s.apply_modifications(&BTreeMap::new()).unwrap(), s);
        let m = s.apply_modifications(&[(Pair(0, 1), 0.0)].into()).unwrap();
        assert_eq!((m.sq(0, 1), m.sq(1, 0)), (0.0, 0.0));
        assert!(matches!(
            s.apply_modifications(&[(Pair(0, 2), -1.0)].into()),
            Err(Error::NegativeDistance { .. })
        ));
        assert_eq!(s.apply_modifications(&[(Pair(1, 1), 1.0)].into()), Err(Error::DegeneratePair(1)));
        assert_eq!(Pair::new(2, 2), Err(Error::DegeneratePair(2)));
    }

    #[test]
    fn cost_examples() {
        let s = DistanceSpace::from_points(&[vec![0.0], vec![1.0]]);
        let inst = WeightedInstance::unit(s, 1, 1, 0).unwrap().with_outlier_weights(vec![5, 1]).unwrap();
        assert_eq!(solution_cost(&inst, &Solution::empty()), 0);
        let sol = Solution { outliers: [0].into(), ..Default::default() };
        assert_eq!(solution_cost(&inst, &sol), 5);
    }

    #[test]
    fn pair_slots_are_dense() {
        let n = 6;
        let mut seen = vec![false; pair_count(n)];
        for i in 0..n {
            for j in i + 1..n {
                let s = pair_slot(n, Pair(i, j));
                assert!(!seen[s]);
                seen[s] = true;
            }
        }
        assert!(seen.into_iter().all(|x| x));
    }

    #[test]
    fn sub_instance_carries_weights() {
        let s = DistanceSpace::from_points(&[vec![0.0], vec![1.0], vec![2.0], vec![4.0]]);
        let mut inst = WeightedInstance::unit(s, 1, 0, 1).unwrap();
        inst.set_pair_weight(Pair(1, 3), 7).unwrap();
        let sub = inst.sub_instance(&[1, 2, 3]);
        assert_eq!(sub.pair_weight(Pair(0, 2)), 7);
        assert_eq!(sub.pair_weight(Pair(0, 1)), 1);
    }
}
