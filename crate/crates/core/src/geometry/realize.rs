use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::space::{sq_norm_diff, DistanceSpace};

/// Coordinates in R^dim for a subset of points, keyed by point index.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Realization {
    pub dim: usize,
    pub coords: BTreeMap<usize, Vec<f64>>,
}

impl Realization {
    pub fn new(dim: usize) -> Self {
        Self { dim, coords: BTreeMap::new() }
    }

    pub fn point(&self, i: usize) -> Option<&[f64]> {
        self.coords.get(&i).map(|v| v.as_slice())
    }

    pub fn sq_dist(&self, i: usize, j: usize) -> f64 {
        sq_norm_diff(&self.coords[&i], &self.coords[&j])
    }

    /// Largest |realized − given| squared distance over pairs of `pts`,
    /// divided by the largest given squared distance (or 1 if all are zero).
    /// Points missing from the realization count as infinite error.
    pub fn max_relative_error(&self, space: &DistanceSpace, pts: &[usize]) -> f64 {
        if pts.iter().any(|p| !self.coords.contains_key(p)) {
            return f64::INFINITY;
        }
        let m = space.max_sq_among(pts);
        let m = if m > 0.0 { m } else { 1.0 };
        let mut worst = 0.0f64;
        for (a, &i) in pts.iter().enumerate() {
            for &j in &pts[a + 1..] {
                worst = worst.max((self.sq_dist(i, j) - space.sq(i, j)).abs());
            }
        }
        worst / m
    }

    pub fn reproduces(&self, space: &DistanceSpace, pts: &[usize], eps: f64) -> bool {
        self.max_relative_error(space, pts) <= eps
    }

    /// Squared distances of the realized points as a space over `pts`.
    pub fn to_space(&self, pts: &[usize]) -> DistanceSpace {
        let points: Vec<Vec<f64>> = pts.iter().map(|p| self.coords[p].clone()).collect();
        DistanceSpace::from_points(&points)
    }
}
