//! Small obstruction sets and the greedy hitting-set approximation.

use std::collections::BTreeSet;

use crate::geometry::Geometry;
use crate::space::DistanceSpace;

/// A set of at most d+3 points of `ground` meeting every inclusion-minimal
/// d-outlier set of `(ground, ρ)`, or `None` if `ground` is d-embeddable.
pub fn obstruction_set(geom: &Geometry, space: &DistanceSpace, ground: &[usize], d: usize) -> Option<Vec<usize>> {
    let mut ground = ground.to_vec();
    ground.sort_unstable();
    ground.dedup();
    if geom.is_embeddable(space, &ground, d as isize) {
        return None;
    }
    let mut a = vec![ground[0]];
    let with = |a: &[usize], extra: &[usize]| {
        let mut v = a.to_vec();
        v.extend_from_slice(extra);
        v
    };
    while a.len() <= d {
        let rest: Vec<usize> = ground.iter().copied().filter(|x| !a.contains(x)).collect();
        for &x in &rest {
            let s = with(&a, &[x]);
            if !geom.is_embeddable(space, &s, a.len() as isize) {
                return Some(s);
            }
        }
        let next = rest.iter().copied().find(|&x| geom.is_independent(space, &with(&a, &[x])).unwrap_or(false));
        match next {
            Some(x) => a.push(x),
            None => break,
        }
    }
    let r = a.len() as isize - 1;
    let rest: Vec<usize> = ground.iter().copied().filter(|x| !a.contains(x)).collect();
    for &x in &rest {
        let s = with(&a, &[x]);
        if !geom.is_embeddable(space, &s, r) {
            return Some(s);
        }
    }
    for (i, &x) in rest.iter().enumerate() {
        for &y in &rest[i + 1..] {
            let s = with(&a, &[x, y]);
            if !geom.is_embeddable(space, &s, r) {
                return Some(s);
            }
        }
    }
    None
}

/// Repeatedly deletes obstruction sets until the rest of `ground` is
/// d-embeddable. The result has at most (d+3)·Opt points.
pub fn greedy_outliers_in(geom: &Geometry, space: &DistanceSpace, ground: &[usize], d: usize) -> BTreeSet<usize> {
    let mut residual: Vec<usize> = ground.to_vec();
    residual.sort_unstable();
    residual.dedup();
    let mut out = BTreeSet::new();
    while let Some(obs) = obstruction_set(geom, space, &residual, d) {
        residual.retain(|x| !obs.contains(x));
        out.extend(obs);
    }
    out
}

pub fn greedy_outliers(geom: &Geometry, space: &DistanceSpace, d: usize) -> BTreeSet<usize> {
    greedy_outliers_in(geom, space, &space.points(), d)
}
