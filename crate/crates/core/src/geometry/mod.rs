//! Embeddability predicates, Cayley–Menger determinants, realizations and
//! independence.
//!
//! The predicates run a pivoted Gram factorization (see [`gram`]): a pivot is
//! the squared height of a point over the affine span of the earlier pivots,
//! and the ratio of consecutive Cayley–Menger determinants equals −2 times
//! that height, so the sign conditions on the determinants and the pivot
//! tests are the same statements.

mod cm;
mod gram;
mod realize;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

pub use cm::{cm_det, cm_det_exact, cm_det_exact_with_overrides, cm_det_with_overrides};
pub use realize::Realization;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{DistanceSpace, Pair};
use gram::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Relative threshold for sign and pivot tests.
    pub eps_sign: f64,
    /// Relative threshold for distance round trips.
    pub eps_dist: f64,
    /// Rescale squared distances by their maximum before testing.
    pub normalize: bool,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self { eps_sign: 1e-8, eps_dist: 1e-6, normalize: true }
    }
}

impl ToleranceConfig {
    pub fn is_valid(&self) -> bool {
        self.eps_sign > 0.0 && self.eps_dist > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Backend {
    #[default]
    Float,
    /// Arbitrary-precision rationals; every f64 input is read exactly.
    Exact,
}

/// Predicate engine: a tolerance configuration plus a scalar backend.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Geometry {
    pub tol: ToleranceConfig,
    pub backend: Backend,
}

impl Geometry {
    pub fn new(tol: ToleranceConfig, backend: Backend) -> Self {
        Self { tol, backend }
    }

    pub fn exact() -> Self {
        Self { tol: ToleranceConfig::default(), backend: Backend::Exact }
    }

    /// Divisor applied to squared distances before float tests.
    fn scale(&self, m: f64) -> f64 {
        if self.tol.normalize {
            if m > 0.0 {
                m
            } else {
                1.0
            }
        } else {
            m.max(1.0)
        }
    }

    fn outcome(&self, space: &DistanceSpace, pts: &[usize], cap: usize) -> Outcome {
        match self.backend {
            Backend::Float => {
                let s = self.scale(space.max_sq_among(pts));
                gram::factor::<f64>(pts.len(), |a, b| space.sq(pts[a], pts[b]) / s, cap, &self.tol.eps_sign).0
            }
            Backend::Exact => {
                let m: Vec<Vec<BigRational>> = pts
                    .iter()
                    .map(|&i| pts.iter().map(|&j| <BigRational as Scalar>::from_f64(space.sq(i, j))).collect())
                    .collect();
                gram::factor::<BigRational>(pts.len(), |a, b| m[a][b].clone(), cap, &<BigRational as Scalar>::zero())
                    .0
            }
        }
    }

    /// Whether the points embed isometrically in R^r. The empty set embeds in
    /// every dimension including negative ones; a nonempty set never embeds
    /// when r < 0.
    pub fn is_embeddable(&self, space: &DistanceSpace, pts: &[usize], r: isize) -> bool {
        if pts.is_empty() {
            return true;
        }
        if r < 0 {
            return false;
        }
        if pts.len() == 1 {
            return true;
        }
        matches!(self.outcome(space, pts, r as usize), Outcome::Rank(_))
    }

    pub fn is_strongly_embeddable(&self, space: &DistanceSpace, pts: &[usize], r: isize) -> bool {
        self.is_embeddable(space, pts, r) && !self.is_embeddable(space, pts, r - 1)
    }

    /// Smallest r with the points r-embeddable, or `None` if there is none.
    pub fn embedding_dim(&self, space: &DistanceSpace, pts: &[usize]) -> Option<usize> {
        match self.outcome(space, pts, pts.len()) {
            Outcome::Rank(r) => Some(r),
            _ => None,
        }
    }

    /// Base point followed by the pivot points of the Gram factorization: an
    /// independent set whose affine span contains every point of `pts`.
    /// `None` if the points embed in no Euclidean space.
    pub fn basis(&self, space: &DistanceSpace, pts: &[usize]) -> Option<Vec<usize>> {
        if pts.is_empty() {
            return Some(Vec::new());
        }
        let s = self.scale(space.max_sq_among(pts));
        let (outcome, steps) =
            gram::factor::<f64>(pts.len(), |a, b| space.sq(pts[a], pts[b]) / s, pts.len(), &self.tol.eps_sign);
        matches!(outcome, Outcome::Rank(_)).then(|| {
            std::iter::once(pts[0]).chain(steps.iter().map(|st| pts[st.pivot])).collect()
        })
    }

    /// A set of r+1 points is independent when it is strongly r-embeddable.
    pub fn is_independent(&self, space: &DistanceSpace, pts: &[usize]) -> Result<bool> {
        if pts.is_empty() {
            return Err(Error::EmptySubset);
        }
        Ok(self.outcome(space, pts, pts.len()) == Outcome::Rank(pts.len() - 1))
    }

    /// Grows `seed` to an inclusion-maximal independent subset of `ground`,
    /// trying candidates in increasing index order.
    pub fn extend_to_max_independent(
        &self,
        space: &DistanceSpace,
        ground: &[usize],
        seed: &[usize],
    ) -> Result<Vec<usize>> {
        if !seed.is_empty() && !self.is_independent(space, seed)? {
            return Err(Error::NotIndependent);
        }
        let mut cand: Vec<usize> = ground.iter().copied().filter(|g| !seed.contains(g)).collect();
        cand.sort_unstable();
        cand.dedup();
        let mut out = seed.to_vec();
        for x in cand {
            out.push(x);
            if !self.is_independent(space, &out)? {
                out.pop();
            }
        }
        Ok(out)
    }

    /// Canonical realization in R^d: the first listed point at the origin and
    /// the basis points in increasing coordinate subspaces with positive
    /// leading coordinate.
    pub fn realize(&self, space: &DistanceSpace, pts: &[usize], d: usize) -> Option<Realization> {
        let mut real = Realization::new(d);
        if pts.is_empty() {
            return Some(real);
        }
        if self.backend == Backend::Exact && !self.is_embeddable(space, pts, d as isize) {
            return None;
        }
        let s = self.scale(space.max_sq_among(pts));
        let (outcome, steps) =
            gram::factor::<f64>(pts.len(), |a, b| space.sq(pts[a], pts[b]) / s, d, &self.tol.eps_sign);
        if self.backend == Backend::Float && !matches!(outcome, Outcome::Rank(_)) {
            return None;
        }
        let root = s.sqrt();
        for (a, &p) in pts.iter().enumerate() {
            let mut c = vec![0.0; d];
            if a > 0 {
                for (k, step) in steps.iter().take(d).enumerate() {
                    c[k] = step.column[a - 1] / step.value.sqrt() * root;
                }
            }
            real.coords.insert(p, c);
        }
        real.reproduces(space, pts, self.tol.eps_dist).then_some(real)
    }

    /// Cayley–Menger determinant with the backend's arithmetic.
    pub fn cm_det(&self, space: &DistanceSpace, pts: &[usize]) -> Result<f64> {
        match self.backend {
            Backend::Float => cm_det(space, pts),
            Backend::Exact => cm_det_exact(space, pts).map(|v| Scalar::to_f64(&v)),
        }
    }

    /// Sign of the (possibly overridden) determinant; values with
    /// |v| ≤ eps_sign·m^(r+2), m = max(1, largest squared distance after
    /// normalization), count as zero.
    pub fn cm_sign(&self, space: &DistanceSpace, pts: &[usize], overrides: &BTreeMap<Pair, f64>) -> Result<i8> {
        if self.backend == Backend::Exact {
            let v = cm_det_exact_with_overrides(space, pts, overrides)?;
            return Ok(if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            });
        }
        cm_det_with_overrides(space, pts, overrides)?;
        let mut m = 0.0f64;
        for (a, &i) in pts.iter().enumerate() {
            for &j in &pts[a + 1..] {
                let p = Pair::new(i, j)?;
                m = m.max(overrides.get(&p).copied().unwrap_or_else(|| space.sq(i, j)));
            }
        }
        let s = if self.tol.normalize && m > 0.0 { m } else { 1.0 };
        let v = cm::cm_det_scaled(space, pts, overrides, s);
        let r = pts.len() as i32 - 1;
        let tol = self.tol.eps_sign * (m / s).max(1.0).powi(r + 2);
        Ok(v.sign_with(&tol))
    }
}
