//! Pivoted LDLᵀ of the Gram matrix relative to a base point.
//!
//! For points x_0..x_m the Gram matrix G_ab = (D_0a + D_0b − D_ab)/2 is PSD of
//! rank ≤ r exactly when the points embed in R^r. Pivoting on the largest
//! remaining diagonal picks the point of greatest height over the span of the
//! points chosen so far, which is the same order a greedy basis would use.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    /// PSD with this numerical rank.
    Rank(usize),
    /// More than `cap` pivots are nonzero.
    TooHigh,
    /// Negative curvature: embeds in no Euclidean space.
    NotPsd,
}

/// One elimination step: pivot row (1-based point position), pivot value, and
/// the Schur column just before elimination (zero for already-pivoted rows).
#[derive(Debug, Clone)]
pub(crate) struct Step<S> {
    pub pivot: usize,
    pub value: S,
    pub column: Vec<S>,
}

/// Factors the Gram matrix of `m` points given through `dist` (squared
/// distances between positions `0..m`; position 0 is the base point).
/// Stops as soon as the rank would exceed `cap`.
pub(crate) fn factor<S: Scalar>(
    m: usize,
    dist: impl Fn(usize, usize) -> S,
    cap: usize,
    tol: &S,
) -> (Outcome, Vec<Step<S>>) {
    if m <= 1 {
        return (Outcome::Rank(0), Vec::new());
    }
    let n = m - 1;
    let two = S::one() + S::one();
    let mut a: Vec<Vec<S>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        dist(0, i + 1)
                    } else {
                        (dist(0, i + 1) + dist(0, j + 1) - dist(i + 1, j + 1)) / two.clone()
                    }
                })
                .collect()
        })
        .collect();
    let mut active = vec![true; n];
    let mut steps: Vec<Step<S>> = Vec::new();
    loop {
        let mut best: Option<usize> = None;
        for i in 0..n {
            if active[i] && best.is_none_or(|b| a[i][i] > a[b][b]) {
                best = Some(i);
            }
        }
        let Some(p) = best else {
            return (Outcome::Rank(steps.len()), steps);
        };
        if a[p][p] <= *tol {
            let neg_tol = -tol.clone();
            for i in (0..n).filter(|&i| active[i]) {
                if a[i][i] < neg_tol {
                    return (Outcome::NotPsd, steps);
                }
                for j in (i + 1..n).filter(|&j| active[j]) {
                    if a[i][j].abs() > *tol {
                        return (Outcome::NotPsd, steps);
                    }
                }
            }
            return (Outcome::Rank(steps.len()), steps);
        }
        if steps.len() == cap {
            return (Outcome::TooHigh, steps);
        }
        let pv = a[p][p].clone();
        let column: Vec<S> = (0..n)
            .map(|i| if active[i] { a[i][p].clone() } else { S::zero() })
            .collect();
        active[p] = false;
        for i in (0..n).filter(|&i| active[i]) {
            if column[i] == S::zero() {
                continue;
            }
            let f = column[i].clone() / pv.clone();
            for j in (0..n).filter(|&j| active[j]) {
                let v = f.clone() * column[j].clone();
                a[i][j] = a[i][j].clone() - v;
            }
        }
        steps.push(Step { pivot: p + 1, value: pv, column });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(d: &[Vec<f64>], cap: usize) -> Outcome {
        factor(d.len(), |i, j| d[i][j], cap, &1e-9).0
    }

    #[test]
    fn collinear_is_rank_one() {
        let d = vec![vec![0.0, 1.0, 4.0], vec![1.0, 0.0, 1.0], vec![4.0, 1.0, 0.0]];
        assert_eq!(run(&d, 5), Outcome::Rank(1));
        assert_eq!(run(&d, 0), Outcome::TooHigh);
    }

    #[test]
    fn triangle_violation_is_not_psd() {
        let d = vec![vec![0.0, 1.0, 9.0], vec![1.0, 0.0, 1.0], vec![9.0, 1.0, 0.0]];
        assert_eq!(run(&d, 5), Outcome::NotPsd);
    }

    #[test]
    fn pivots_are_squared_heights() {
        // right triangle with legs 3 and 4 from the base point
        let d = vec![vec![0.0, 9.0, 16.0], vec![9.0, 0.0, 25.0], vec![16.0, 25.0, 0.0]];
        let (out, steps) = factor(3, |i, j| d[i][j], 5, &1e-9);
        assert_eq!(out, Outcome::Rank(2));
        assert_eq!(steps[0].pivot, 2);
        assert_eq!(steps[0].value, 16.0);
        assert_eq!(steps[1].value, 9.0);
    }
}
