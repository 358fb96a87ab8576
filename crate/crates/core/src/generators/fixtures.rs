use std::collections::{BTreeMap, BTreeSet};

use crate::space::{DistanceSpace, Pair, Solution, WeightedInstance};

const PAPER_D: [[f64; 9]; 9] = [
    [0.0, 7.0, 1.0, 2.0, 4.0, 5.0, 1.0, 4.0, 5.0],
    [7.0, 0.0, 2.0, 1.0, 1.0, 2.0, 10.0, 5.0, 4.0],
    [1.0, 2.0, 0.0, 1.0, 11.0, 4.0, 4.0, 1.0, 2.0],
    [2.0, 1.0, 1.0, 0.0, 2.0, 1.0, 8.0, 2.0, 1.0],
    [4.0, 1.0, 11.0, 2.0, 0.0, 1.0, 12.0, 8.0, 5.0],
    [5.0, 2.0, 4.0, 1.0, 1.0, 0.0, 7.0, 5.0, 2.0],
    [1.0, 10.0, 4.0, 8.0, 12.0, 7.0, 0.0, 8.0, 9.0],
    [4.0, 5.0, 1.0, 2.0, 8.0, 5.0, 8.0, 0.0, 1.0],
    [5.0, 4.0, 2.0, 1.0, 5.0, 2.0, 9.0, 1.0, 0.0],
];

fn labels(ids: &[usize]) -> Vec<String> {
    ids.iter().map(|i| i.to_string()).collect()
}

/// The 9-point example: d = 2, k_out = 1, k_mod = 2, unit weights, W = 3.
/// Labels are "1".."9".
pub fn paper_example() -> WeightedInstance {
    let rows: Vec<Vec<f64>> = PAPER_D.iter().map(|r| r.to_vec()).collect();
    let space = DistanceSpace::with_labels(labels(&[1, 2, 3, 4, 5, 6, 7, 8, 9]), &rows).expect("valid fixture");
    WeightedInstance::unit(space, 2, 1, 2).expect("d > 0").with_budget(3)
}

/// Delete point "7" and set ρ²(1,2) = 1, ρ²(3,5) = 5.
pub fn paper_witness() -> Solution {
    Solution {
        outliers: BTreeSet::from([6]),
        modifications: BTreeMap::from([(Pair(0, 1), 1.0), (Pair(2, 4), 5.0)]),
        realization: None,
        cost: 3,
    }
}

/// The repaired 8-point space; embeds in the plane.
pub fn paper_repaired() -> DistanceSpace {
    let keep = [0, 1, 2, 3, 4, 5, 7, 8];
    let w = paper_witness();
    let mut rows = vec![vec![0.0; 8]; 8];
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            if i != j {
                let p = Pair(i.min(j), i.max(j));
                rows[a][b] = w.modifications.get(&p).copied().unwrap_or(PAPER_D[i][j]);
            }
        }
    }
    DistanceSpace::with_labels(labels(&[1, 2, 3, 4, 5, 6, 8, 9]), &rows).expect("valid fixture")
}

/// Three mutually far "bent" triples (squared sides 1, 1, 9) with d = 1 and
/// a single outlier allowed. Each triple needs its own deletion.
pub fn overbudget_gadget() -> WeightedInstance {
    let copies = 3;
    let n = 3 * copies;
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            rows[i][j] = if i / 3 != j / 3 {
                10_000.0 + 100.0 * (i / 3 + j / 3) as f64
            } else if (i % 3).abs_diff(j % 3) == 2 {
                9.0
            } else {
                1.0
            };
        }
    }
    let space = DistanceSpace::from_rows(&rows).expect("valid gadget");
    WeightedInstance::unit(space, 1, 1, 0).expect("d > 0")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Geometry;
    use crate::space::verify_solution;

    #[test]
    fn witness_verifies() {
        let g = Geometry::exact();
        let inst = paper_example();
        assert_eq!(verify_solution(&g, &inst, &paper_witness()), Ok(()));
        assert!(g.is_embeddable(&paper_repaired(), &paper_repaired().points(), 2));
        assert!(!g.is_embeddable(&inst.space, &inst.space.points(), 2));
    }

    #[test]
    fn repaired_matches_figure() {
        let r = paper_repaired();
        assert_eq!(r.sq(0, 1), 1.0);
        assert_eq!(r.sq(2, 4), 5.0);
        assert_eq!(r.sq(4, 6), 8.0);
        assert_eq!(r.label(6), "8");
    }
}
