//! Greedy partition of an embeddable point set into metric bases.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::space::DistanceSpace;

#[derive(Debug, Clone, PartialEq)]
pub struct BasisPartition {
    /// Y_1..Y_ℓ in construction order; each part sorted.
    pub parts: Vec<Vec<usize>>,
    /// Part size h → indices into `parts`, in increasing order.
    pub size_classes: BTreeMap<usize, Vec<usize>>,
    pub h_star: Option<usize>,
}

impl BasisPartition {
    pub fn class(&self, h: usize) -> &[usize] {
        self.size_classes.get(&h).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Largest h whose class has at least `threshold` parts.
    pub fn largest_class_at_least(&self, threshold: usize) -> Option<usize> {
        self.size_classes.iter().rev().find(|(_, v)| v.len() >= threshold).map(|(&h, _)| h)
    }
}

/// Repeatedly seeds a part with the lowest remaining point and extends it
/// while independence holds.
pub fn partition_into_bases(geom: &Geometry, space: &DistanceSpace, y: &[usize], d: usize) -> Result<BasisPartition> {
    let mut rest = y.to_vec();
    rest.sort_unstable();
    rest.dedup();
    if !geom.is_embeddable(space, &rest, d as isize) {
        return Err(Error::NotEmbeddable(d));
    }
    let mut parts = Vec::new();
    while let Some(&first) = rest.first() {
        let mut part = geom.extend_to_max_independent(space, &rest, &[first])?;
        part.sort_unstable();
        rest.retain(|p| part.binary_search(p).is_err());
        parts.push(part);
    }
    let mut size_classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, p) in parts.iter().enumerate() {
        size_classes.entry(p.len()).or_default().push(i);
    }
    Ok(BasisPartition { parts, size_classes, h_star: None })
}

/// `part ∪ {x}` embeds in R^d.
pub fn is_x_compatible(geom: &Geometry, space: &DistanceSpace, part: &[usize], x: usize, d: usize) -> bool {
    let mut s = part.to_vec();
    s.push(x);
    geom.is_embeddable(space, &s, d as isize)
}

/// `a ∪ b ∪ {x}` embeds in R^d.
pub fn is_pair_x_compatible(
    geom: &Geometry,
    space: &DistanceSpace,
    a: &[usize],
    b: &[usize],
    x: usize,
    d: usize,
) -> bool {
    let mut s = a.to_vec();
    s.extend_from_slice(b);
    s.push(x);
    geom.is_embeddable(space, &s, d as isize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_plane_points_give_triples() {
        let pts = vec![vec![0.0, 0.0], vec![3.0, 1.0], vec![1.0, 4.0], vec![5.0, 5.0], vec![-2.0, 3.0], vec![4.0, -3.0]];
        let s = DistanceSpace::from_points(&pts);
        let p = partition_into_bases(&Geometry::default(), &s, &s.points(), 2).unwrap();
        assert_eq!(p.parts.iter().map(Vec::len).collect::<Vec<_>>(), vec![3, 3]);
    }

    #[test]
    fn collinear_points() {
        let s = DistanceSpace::from_points(&[vec![0.0], vec![1.0], vec![3.0]]);
        let p = partition_into_bases(&Geometry::default(), &s, &s.points(), 2).unwrap();
        assert_eq!(p.parts, vec![vec![0, 1], vec![2]]);
        assert_eq!(p.class(1), &[1]);
    }

    #[test]
    fn single_point_and_errors() {
        let s = DistanceSpace::from_rows(&[vec![0.0, 1.0, 9.0], vec![1.0, 0.0, 1.0], vec![9.0, 1.0, 0.0]]).unwrap();
        let p = partition_into_bases(&Geometry::default(), &s, &[2], 1).unwrap();
        assert_eq!(p.parts, vec![vec![2]]);
        assert_eq!(partition_into_bases(&Geometry::default(), &s, &[0, 1, 2], 1), Err(Error::NotEmbeddable(1)));
    }

    #[test]
    fn compatibility() {
        let g = Geometry::default();
        let s = DistanceSpace::from_points(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![2.0, 2.0]]);
        assert!(is_x_compatible(&g, &s, &[0, 1], 3, 2));
        assert!(!is_x_compatible(&g, &s, &[0, 1], 3, 1));
        assert!(is_pair_x_compatible(&g, &s, &[0], &[1], 2, 2));
    }
}
