//! Cayley–Menger determinants.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{determinant, Scalar};
use crate::space::{DistanceSpace, Pair};

fn check_points(space: &DistanceSpace, points: &[usize]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &p in points {
        if p >= space.len() {
            return Err(Error::UnknownPoint(p));
        }
        if !seen.insert(p) {
            return Err(Error::DuplicatePoint(p));
        }
    }
    Ok(())
}

fn check_overrides(points: &[usize], overrides: &BTreeMap<Pair, f64>) -> Result<()> {
    for (&Pair(i, j), &v) in overrides {
        if !points.contains(&i) || !points.contains(&j) {
            return Err(Error::ForeignPair(i, j));
        }
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::NegativeDistance { i, j, value: v });
        }
    }
    Ok(())
}

/// Bordered matrix [[0, 1ᵀ], [1, D]] over the given points, with overridden
/// entries substituted, then scaled by `1/scale`.
fn bordered<S: Scalar>(
    space: &DistanceSpace,
    points: &[usize],
    overrides: &BTreeMap<Pair, f64>,
    scale: f64,
) -> Vec<Vec<S>> {
    let k = points.len() + 1;
    let mut m = vec![vec![S::zero(); k]; k];
    for i in 1..k {
        m[0][i] = S::one();
        m[i][0] = S::one();
    }
    let s = S::from_f64(scale);
    for (a, &i) in points.iter().enumerate() {
        for (b, &j) in points.iter().enumerate() {
            if a == b {
                continue;
            }
            let raw = Pair::new(i, j)
                .ok()
                .and_then(|p| overrides.get(&p).copied())
                .unwrap_or_else(|| space.sq(i, j));
            m[a + 1][b + 1] = S::from_f64(raw) / s.clone();
        }
    }
    m
}

pub fn cm_det(space: &DistanceSpace, points: &[usize]) -> Result<f64> {
    cm_det_with_overrides(space, points, &BTreeMap::new())
}

pub fn cm_det_with_overrides(
    space: &DistanceSpace,
    points: &[usize],
    overrides: &BTreeMap<Pair, f64>,
) -> Result<f64> {
    check_points(space, points)?;
    check_overrides(points, overrides)?;
    Ok(determinant::<f64>(bordered(space, points, overrides, 1.0)))
}

pub fn cm_det_exact(space: &DistanceSpace, points: &[usize]) -> Result<BigRational> {
    cm_det_exact_with_overrides(space, points, &BTreeMap::new())
}

pub fn cm_det_exact_with_overrides(
    space: &DistanceSpace,
    points: &[usize],
    overrides: &BTreeMap<Pair, f64>,
) -> Result<BigRational> {
    check_points(space, points)?;
    check_overrides(points, overrides)?;
    Ok(determinant::<BigRational>(bordered(space, points, overrides, 1.0)))
}

/// Determinant computed on distances divided by `scale`; multiply by
/// `scale^(r+1)` to recover the raw value.
pub(crate) fn cm_det_scaled(
    space: &DistanceSpace,
    points: &[usize],
    overrides: &BTreeMap<Pair, f64>,
    scale: f64,
) -> f64 {
    determinant::<f64>(bordered(space, points, overrides, scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn tri(a: f64, b: f64, c: f64) -> DistanceSpace {
        DistanceSpace::from_rows(&[vec![0.0, a, b], vec![a, 0.0, c], vec![b, c, 0.0]]).unwrap()
    }

    // cofactor expansion along the first row, independent of elimination
    fn cofactor(m: &[Vec<f64>]) -> f64 {
        if m.len() == 1 {
            return m[0][0];
        }
        let mut total = 0.0;
        for c in 0..m.len() {
            let minor: Vec<Vec<f64>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect()).collect();
            let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * m[0][c] * cofactor(&minor);
        }
        total
    }

    #[test]
    fn pair_is_twice_the_square() {
        let s = tri(7.0, 1.0, 1.0);
        assert_eq!(cm_det(&s, &[0, 1]).unwrap(), 14.0);
        assert_eq!(cm_det_exact(&s, &[0, 1]).unwrap(), BigRational::from_integer(BigInt::from(14)));
    }

    #[test]
    fn equilateral_triangle() {
        let s = tri(1.0, 1.0, 1.0);
        let oracle = cofactor(&[
            vec![0.0, 1.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0, 1.0],
            vec![1.0, 1.0, 0.0, 1.0],
            vec![1.0, 1.0, 1.0, 0.0],
        ]);
        assert_eq!(oracle, -3.0);
        assert!((cm_det(&s, &[0, 1, 2]).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn single_point() {
        assert_eq!(cm_det(&tri(1.0, 1.0, 1.0), &[2]).unwrap(), -1.0);
    }

    #[test]
    fn overrides() {
        let s = tri(1.0, 4.0, 9.0);
        let empty = BTreeMap::new();
        assert_eq!(cm_det_with_overrides(&s, &[0, 1, 2], &empty).unwrap(), cm_det(&s, &[0, 1, 2]).unwrap());
        let one: BTreeMap<Pair, f64> = [(Pair(0, 1), 7.0)].into();
        assert_eq!(cm_det_with_overrides(&s, &[0, 1], &one).unwrap(), 14.0);
        let all: BTreeMap<Pair, f64> = [(Pair(0, 1), 1.0), (Pair(0, 2), 1.0), (Pair(1, 2), 1.0)].into();
        assert!((cm_det_with_overrides(&s, &[0, 1, 2], &all).unwrap() + 3.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let s = tri(1.0, 1.0, 1.0);
        assert_eq!(cm_det(&s, &[0, 0]), Err(Error::DuplicatePoint(0)));
        let neg: BTreeMap<Pair, f64> = [(Pair(0, 1), -1.0)].into();
        assert!(matches!(cm_det_with_overrides(&s, &[0, 1], &neg), Err(Error::NegativeDistance { .. })));
        let foreign: BTreeMap<Pair, f64> = [(Pair(0, 2), 1.0)].into();
        assert_eq!(cm_det_with_overrides(&s, &[0, 1], &foreign), Err(Error::ForeignPair(0, 2)));
    }
}
