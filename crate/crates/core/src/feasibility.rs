//! Realizability in R^r when some pairs have free squared distances.
//!
//! Three stages, each tried only if the previous one cannot decide:
//! an exact necessary condition (every set containing no free pair has all
//! its distances fixed and must embed on its own), exact placement relative
//! to the points that touch no free pair, and damped Gauss–Newton
//! (Levenberg–Marquardt) over all coordinates from several starts. A
//! returned witness is always checked; "infeasible" from the numeric stage
//! may be a miss.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use crate::geometry::{Backend, Geometry, Realization};
use crate::rng::rng_for;
use crate::space::{DistanceSpace, Pair};

#[derive(Debug, Clone, PartialEq)]
pub struct FreePairProblem {
    pub space: DistanceSpace,
    pub free: BTreeSet<Pair>,
    pub dim: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub residual_tol: f64,
    pub seed: u64,
}

impl FreePairProblem {
    pub fn new(space: DistanceSpace, free: BTreeSet<Pair>, dim: usize) -> Self {
        Self { space, free, dim, restarts: 20, max_iters: 500, residual_tol: 1e-7, seed: 0 }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn fixed_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.space.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if !self.free.contains(&Pair(i, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn scale(&self) -> f64 {
        let m = self
            .fixed_pairs()
            .iter()
            .map(|&(i, j)| self.space.sq(i, j))
            .fold(0.0, f64::max);
        if m > 0.0 {
            m
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// No free pairs: plain realization.
    Direct,
    /// Positions fixed by the points away from free pairs.
    Anchored,
    /// Found by the numeric search from this start (0 is the warm start).
    Numeric(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub realization: Realization,
    pub free_values: BTreeMap<Pair, f64>,
    pub method: Method,
}

fn witness(prob: &FreePairProblem, coords: Vec<Vec<f64>>, method: Method) -> Witness {
    let mut real = Realization::new(prob.dim);
    for (i, c) in coords.into_iter().enumerate() {
        real.coords.insert(i, c);
    }
    let free_values = prob.free.iter().map(|&p| (p, real.sq_dist(p.lo(), p.hi()))).collect();
    Witness { realization: real, free_values, method }
}

/// Points touching no free pair.
fn untouched(prob: &FreePairProblem) -> Vec<usize> {
    (0..prob.space.len()).filter(|&i| !prob.free.iter().any(|p| p.touches(i))).collect()
}

/// Every set containing no free pair must embed. Checks the maximal such
/// sets; exact when there is a single free pair.
pub fn passes_filter(geom: &Geometry, prob: &FreePairProblem) -> bool {
    let n = prob.space.len();
    let touched: Vec<usize> = (0..n).filter(|&i| prob.free.iter().any(|p| p.touches(i))).collect();
    let base = untouched(prob);
    let t = touched.len();
    if t > 20 {
        return geom.is_embeddable(&prob.space, &base, prob.dim as isize);
    }
    for mask in 0u32..(1u32 << t) {
        let chosen: Vec<usize> = (0..t).filter(|&b| mask >> b & 1 == 1).map(|b| touched[b]).collect();
        let independent = prob.free.iter().all(|p| !(chosen.contains(&p.lo()) && chosen.contains(&p.hi())));
        if !independent {
            continue;
        }
        let maximal = (0..t).filter(|&b| mask >> b & 1 == 0).all(|b| {
            let v = touched[b];
            prob.free.iter().any(|p| p.touches(v) && chosen.contains(&(p.lo() + p.hi() - v)))
        });
        if !maximal {
            continue;
        }
        let mut pts = base.clone();
        pts.extend(&chosen);
        pts.sort_unstable();
        if !geom.is_embeddable(&prob.space, &pts, prob.dim as isize) {
            return false;
        }
    }
    true
}

fn fixed_error(prob: &FreePairProblem, coords: &[Vec<f64>]) -> f64 {
    let m = prob.scale();
    prob.fixed_pairs()
        .iter()
        .map(|&(i, j)| (crate::space::sq_norm_diff(&coords[i], &coords[j]) - prob.space.sq(i, j)).abs() / m)
        .fold(0.0, f64::max)
}

/// Placement of the touched points relative to a realization of the
/// untouched ones: each touched point gets a position inside the span of the
/// anchors plus a height above it.
struct Anchored {
    coords: Vec<Vec<f64>>,
    span: usize,
    heights: Vec<(usize, f64)>,
}

fn anchor(geom: &Geometry, prob: &FreePairProblem) -> Option<Anchored> {
    let space = &prob.space;
    let dim = prob.dim;
    let s_pts = untouched(prob);
    if s_pts.is_empty() {
        return None;
    }
    let basis = geom.basis(space, &s_pts)?;
    let span = basis.len() - 1;
    if span > dim {
        return None;
    }
    let real = geom.realize(space, &s_pts, dim)?;
    let n = space.len();
    let mut coords = vec![vec![0.0; dim]; n];
    for &p in &s_pts {
        coords[p] = real.coords[&p].clone();
    }
    let b0 = basis[0];
    let mut heights = Vec::new();
    for v in (0..n).filter(|v| !s_pts.contains(v)) {
        // forward substitution: basis point k has support on coordinates < k
        let mut q = vec![0.0; dim];
        for k in 1..=span {
            let pb = &coords[basis[k]];
            let rhs = (pb.iter().map(|x| x * x).sum::<f64>() + space.sq(v, b0) - space.sq(v, basis[k])) / 2.0;
            let acc: f64 = (0..k - 1).map(|j| pb[j] * q[j]).sum();
            q[k - 1] = (rhs - acc) / pb[k - 1];
        }
        let h2 = space.sq(v, b0) - q.iter().map(|x| x * x).sum::<f64>();
        let m = prob.scale();
        if h2 < -geom.tol.eps_dist * m {
            return None;
        }
        let h = h2.max(0.0).sqrt();
        if h > (geom.tol.eps_sign * m).sqrt() {
            heights.push((v, h));
        }
        coords[v] = q;
    }
    Some(Anchored { coords, span, heights })
}

fn try_anchored(geom: &Geometry, prob: &FreePairProblem, a: &Anchored) -> Option<Vec<Vec<f64>>> {
    let dim = prob.dim;
    let tol = geom.tol.eps_dist * 0.1;
    if a.heights.is_empty() {
        return (fixed_error(prob, &a.coords) <= tol).then(|| a.coords.clone());
    }
    if a.span >= dim {
        return None;
    }
    if a.span + 1 != dim || a.heights.len() > 20 {
        return None;
    }
    let m = a.heights.len();
    for mask in 0u32..(1u32 << m) {
        let mut c = a.coords.clone();
        for (b, &(v, h)) in a.heights.iter().enumerate() {
            c[v][a.span] = if mask >> b & 1 == 1 { -h } else { h };
        }
        if fixed_error(prob, &c) <= tol {
            return Some(c);
        }
    }
    None
}

/// Levenberg–Marquardt on the normalized residuals of the fixed pairs.
fn levenberg_marquardt(prob: &FreePairProblem, start: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let n = prob.space.len();
    let dim = prob.dim;
    let pairs = prob.fixed_pairs();
    let m = prob.scale();
    let nv = n * dim;
    let unpack = |x: &DVector<f64>| -> Vec<Vec<f64>> { (0..n).map(|i| (0..dim).map(|k| x[i * dim + k]).collect()).collect() };
    let residuals = |x: &DVector<f64>| -> DVector<f64> {
        DVector::from_iterator(
            pairs.len(),
            pairs.iter().map(|&(i, j)| {
                let d2: f64 = (0..dim).map(|k| (x[i * dim + k] - x[j * dim + k]).powi(2)).sum();
                (d2 - prob.space.sq(i, j)) / m
            }),
        )
    };
    let mut x = DVector::from_iterator(nv, start.into_iter().flatten());
    let mut r = residuals(&x);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    for _ in 0..prob.max_iters {
        // keep polishing well past the acceptance threshold so the repaired
        // distances pass the tighter pivot tests downstream
        if r.amax() <= 1e-13 {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(pairs.len(), nv);
        for (row, &(i, j)) in pairs.iter().enumerate() {
            for k in 0..dim {
                let g = 2.0 * (x[i * dim + k] - x[j * dim + k]) / m;
                jac[(row, i * dim + k)] = g;
                jac[(row, j * dim + k)] = -g;
            }
        }
        let jt = jac.transpose();
        let h = &jt * &jac;
        let g = &jt * &r;
        let mut improved = false;
        while lambda < 1e12 {
            let mut a = h.clone();
            for i in 0..nv {
                a[(i, i)] += lambda * (h[(i, i)] + 1e-9);
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let step = chol.solve(&(-&g));
            let xn = &x + &step;
            let rn = residuals(&xn);
            let cn = rn.norm_squared();
            if cn < cost {
                x = xn;
                r = rn;
                cost = cn;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (r.amax() <= prob.residual_tol).then(|| unpack(&x))
}

fn random_start(prob: &FreePairProblem, restart: usize) -> Vec<Vec<f64>> {
    let mut rng = rng_for(prob.seed, &[restart as u64]);
    let half = prob.scale().sqrt();
    (0..prob.space.len()).map(|_| (0..prob.dim).map(|_| rng.gen_range(-half..=half)).collect()).collect()
}

fn warm_start(prob: &FreePairProblem, a: &Anchored) -> Vec<Vec<f64>> {
    let mut rng = rng_for(prob.seed, &[u64::MAX]);
    let mut c = a.coords.clone();
    let free_dims = prob.dim - a.span.min(prob.dim);
    for &(v, h) in &a.heights {
        if free_dims == 0 {
            break;
        }
        let dir: Vec<f64> = (0..free_dims).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
        for (k, t) in dir.iter().enumerate() {
            c[v][a.span + k] = h * t / norm;
        }
    }
    c
}

/// Decides the problem; `None` means infeasible or not found.
pub fn feasible_with_free_pairs(geom: &Geometry, prob: &FreePairProblem) -> Option<Witness> {
    let n = prob.space.len();
    let all: Vec<usize> = (0..n).collect();
    if prob.free.is_empty() {
        let real = geom.realize(&prob.space, &all, prob.dim)?;
        let coords = all.iter().map(|i| real.coords[i].clone()).collect();
        return Some(witness(prob, coords, Method::Direct));
    }
    if prob.dim == 0 {
        let ok = prob.fixed_pairs().iter().all(|&(i, j)| prob.space.sq(i, j) <= geom.tol.eps_dist * prob.scale());
        return ok.then(|| witness(prob, vec![Vec::new(); n], Method::Direct));
    }
    if !passes_filter(geom, prob) {
        return None;
    }
    let anchored = anchor(geom, prob);
    if let Some(a) = &anchored {
        if let Some(c) = try_anchored(geom, prob, a) {
            let w = witness(prob, c, Method::Anchored);
            if verify_witness(geom, &prob.space, &prob.free, prob.dim, &w.realization) {
                return Some(w);
            }
        }
        // positions fully pinned down and still inconsistent
        if a.heights.is_empty() || a.span + 1 >= prob.dim {
            return None;
        }
    }
    let starts: Vec<usize> = (0..=prob.restarts).collect();
    starts.par_iter().find_map_first(|&i| {
        let start = match (&anchored, i) {
            (Some(a), 0) => warm_start(prob, a),
            (None, 0) => return None,
            _ => random_start(prob, i),
        };
        let c = levenberg_marquardt(prob, start)?;
        let w = witness(prob, c, Method::Numeric(i));
        verify_witness(geom, &prob.space, &prob.free, prob.dim, &w.realization).then_some(w)
    })
}

/// Checks a candidate realization: fixed distances reproduced, and the
/// Cayley–Menger sign and vanishing conditions (with free pairs replaced by
/// their realized values) hold for a pivoted anchor set.
pub fn verify_witness(
    geom: &Geometry,
    space: &DistanceSpace,
    free: &BTreeSet<Pair>,
    r: usize,
    real: &Realization,
) -> bool {
    let n = space.len();
    let all: Vec<usize> = (0..n).collect();
    if all.iter().any(|i| real.coords.get(i).is_none_or(|c| c.len() != real.dim)) {
        return false;
    }
    let mut m = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            if !free.contains(&Pair(i, j)) {
                m = m.max(space.sq(i, j));
            }
        }
    }
    let m = if m > 0.0 { m } else { 1.0 };
    let overrides: BTreeMap<Pair, f64> = free.iter().map(|&p| (p, real.sq_dist(p.lo(), p.hi()))).collect();
    if overrides.values().any(|&v| !(v >= 0.0)) {
        return false;
    }
    for i in 0..n {
        for j in i + 1..n {
            if free.contains(&Pair(i, j)) {
                continue;
            }
            if (real.sq_dist(i, j) - space.sq(i, j)).abs() > geom.tol.eps_dist * m {
                return false;
            }
        }
    }
    if n <= 1 {
        return true;
    }
    // the repaired space, to pick anchors and evaluate the determinants on
    let repaired = match space.apply_modifications(&overrides) {
        Ok(s) => s,
        Err(_) => return false,
    };
    // witnesses are floating point, so the exact backend would see noise as rank
    let fgeom = Geometry::new(geom.tol, Backend::Float);
    let Some(anchors) = fgeom.basis(&repaired, &all) else {
        return false;
    };
    let rank = anchors.len() - 1;
    if rank > r {
        return false;
    }
    let scaled = repaired.scaled(1.0 / repaired.max_sq().max(f64::MIN_POSITIVE));
    let det = |pts: &[usize]| crate::geometry::cm_det(&scaled, pts).unwrap_or(f64::NAN);
    for j in 1..=rank {
        let v = det(&anchors[..=j]);
        let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
        if !(sign * v > 0.0) {
            return false;
        }
    }
    let size_tol = |k: usize| geom.tol.eps_dist * (1..=k).map(|x| x as f64).product::<f64>();
    let rest: Vec<usize> = all.iter().copied().filter(|p| !anchors.contains(p)).collect();
    for (a, &y) in rest.iter().enumerate() {
        let mut s = anchors.clone();
        s.push(y);
        if det(&s).abs() > size_tol(s.len() + 1) {
            return false;
        }
        for &z in &rest[a + 1..] {
            let mut s2 = s.clone();
            s2.push(z);
            if det(&s2).abs() > size_tol(s2.len() + 1) {
                return false;
            }
        }
    }
    true
}
