//! The hardness constructions, as generators. Stored values are squared.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::oracle::rational_rank;
use crate::rng::rng_for;
use crate::space::{pair_count, DistanceSpace, WeightedInstance};

fn square(v: usize) -> f64 {
    (v * v) as f64
}

/// Outlier instance on the line that is yes iff `g` has a vertex cover of
/// size at most `k`. Points "p1".."p{k+2}" come first, then "x1".."xn".
pub fn vc_reduction(g: &Graph, k: usize) -> Result<WeightedInstance> {
    let n = g.n();
    if k > n {
        return Err(Error::InvalidSpec(format!("k = {k} exceeds the {n} vertices")));
    }
    let np = k + 2;
    let total = np + n;
    let mut rows = vec![vec![0.0; total]; total];
    for i in 1..=np {
        for j in 1..=np {
            rows[i - 1][j - 1] = square(i.abs_diff(j));
        }
        for j in 1..=n {
            let v = square(i + j);
            rows[i - 1][np + j - 1] = v;
            rows[np + j - 1][i - 1] = v;
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            if i != j && !g.has_edge(i - 1, j - 1) {
                rows[np + i - 1][np + j - 1] = square(i.abs_diff(j));
            }
        }
    }
    let labels = (1..=np).map(|i| format!("p{i}")).chain((1..=n).map(|j| format!("x{j}"))).collect();
    let space = DistanceSpace::with_labels(labels, &rows)?;
    WeightedInstance::unit(space, 1, k, 0)
}

/// Modification instance on the line that is yes iff `g` has a cut with at
/// least `ell` edges. Uses k = C(n,2) − ell and k + 1 coincident points
/// "p0".."pk" followed by "x1".."xn".
pub fn maxcut_reduction(g: &Graph, ell: usize) -> Result<WeightedInstance> {
    let n = g.n();
    let pairs = pair_count(n);
    if ell > pairs {
        return Err(Error::InvalidSpec(format!("ell = {ell} exceeds C({n},2) = {pairs}")));
    }
    let k = pairs - ell;
    let np = k + 1;
    let total = np + n;
    let mut rows = vec![vec![0.0; total]; total];
    for i in 0..np {
        for j in 0..n {
            rows[i][np + j] = 1.0;
            rows[np + j][i] = 1.0;
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                rows[np + i][np + j] = if g.has_edge(i, j) { 4.0 } else { 1.0 };
            }
        }
    }
    let labels = (0..np).map(|i| format!("p{i}")).chain((1..=n).map(|j| format!("x{j}"))).collect();
    let space = DistanceSpace::with_labels(labels, &rows)?;
    WeightedInstance::unit(space, 1, 0, k)
}

/// Outlier instance in dimension rank(M) − h that is yes iff deleting at most
/// `k` columns of `m` lowers its rank by at least `h`.
pub fn rank_reduction(m: &[Vec<f64>], h: usize, k: usize) -> Result<WeightedInstance> {
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidSpec("ragged matrix".into()));
    }
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidSpec("non-finite matrix entry".into()));
    }
    if let Some(j) = (0..cols).find(|&j| m.iter().all(|r| r[j] == 0.0)) {
        return Err(Error::ZeroColumn(j));
    }
    let rank = rational_rank(m);
    if h == 0 || h > rank {
        return Err(Error::RankTooSmall { h, rank });
    }
    let col = |j: usize| m.iter().map(move |r| r[j]);
    let np = k + 1;
    let total = np + cols;
    let mut rows = vec![vec![0.0; total]; total];
    for j in 0..cols {
        let norm: f64 = col(j).map(|v| v * v).sum();
        for i in 0..np {
            rows[i][np + j] = norm;
            rows[np + j][i] = norm;
        }
        for l in 0..cols {
            rows[np + j][np + l] = col(j).zip(col(l)).map(|(a, b)| (a - b) * (a - b)).sum();
        }
    }
    let labels = (0..np).map(|i| format!("p{i}")).chain((1..=cols).map(|j| format!("x{j}"))).collect();
    let space = DistanceSpace::with_labels(labels, &rows)?;
    WeightedInstance::unit(space, rank - h, k, 0)
}

/// Each edge present independently with probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = rng_for(seed, &[0x6772_6170_68, n as u64]);
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|_| rng.gen_bool(p.clamp(0.0, 1.0))).collect();
    Graph::new(n, edges).expect("generated edges are simple")
}

/// Entries uniform in {−1, 0, 1}, with every column nonzero.
pub fn random_sign_matrix(rows: usize, cols: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_for(seed, &[0x6d61_7472_6978, rows as u64, cols as u64]);
    let mut m = vec![vec![0.0; cols]; rows];
    for j in 0..cols {
        loop {
            for r in m.iter_mut() {
                r[j] = rng.gen_range(-1i32..=1) as f64;
            }
            if rows == 0 || m.iter().any(|r| r[j] != 0.0) {
                break;
            }
        }
    }
    m
}
