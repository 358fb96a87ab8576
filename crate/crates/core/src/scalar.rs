//! Scalar kernel shared by the determinant and Gram-factorization code.
//!
//! Two backends exist: plain `f64` (tolerance-based zero tests) and
//! arbitrary-precision rationals (exact zero tests). Every `f64` is a dyadic
//! rational, so conversion into the exact backend never loses information.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Exact conversion for the rational backend; identity for `f64`.
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;
    /// Sign of `self` with everything in `[-tol, tol]` treated as zero.
    fn sign_with(&self, tol: &Self) -> i8 {
        if *self > *tol {
            1
        } else if *self < -tol.clone() {
            -1
        } else {
            0
        }
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        BigRational::from_integer(BigInt::from(1))
    }
    fn from_f64(v: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(v).expect("finite squared distance")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// Determinant by Gaussian elimination. Partial pivoting on magnitude, which
/// for the rational backend only matters for picking a nonzero pivot.
pub fn determinant<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    let mut det = S::one();
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[col][col].abs();
        for (row, r) in m.iter().enumerate().skip(col + 1) {
            let a = r[col].abs();
            if a > best {
                best = a;
                pivot = row;
            }
        }
        if best == S::zero() {
            return S::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det = det * p.clone();
        for row in col + 1..n {
            if m[row][col] == S::zero() {
                continue;
            }
            let factor = m[row][col].clone() / p.clone();
            for k in col..n {
                let v = m[col][k].clone() * factor.clone();
                m[row][k] = m[row][k].clone() - v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn float_determinant_of_permutation() {
        let m = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(determinant(m), -1.0);
    }

    #[test]
    fn rational_determinant_needs_row_swap() {
        let m = vec![
            vec![rat(0), rat(2), rat(1)],
            vec![rat(1), rat(0), rat(0)],
            vec![rat(0), rat(1), rat(3)],
        ];
        // expand along the second row: -1 * (2*3 - 1*1) = -5
        assert_eq!(determinant(m), rat(-5));
    }

    #[test]
    fn exact_conversion_keeps_dyadics() {
        let v = <BigRational as Scalar>::from_f64(0.375);
        assert_eq!(v, BigRational::new(BigInt::from(3), BigInt::from(8)));
    }

    #[test]
    fn sign_with_tolerance() {
        assert_eq!(1e-12f64.sign_with(&1e-9), 0);
        assert_eq!((-1.0f64).sign_with(&1e-9), -1);
        assert_eq!(rat(0).sign_with(&rat(0)), 0);
    }
}
