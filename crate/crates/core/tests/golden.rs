//! The 9-point worked example, checked through the library.

use edmrepair::exact::{solve_weeo, WeeoOptions};
use edmrepair::generators::{paper_example, paper_repaired, paper_witness};
use edmrepair::oracle::{brute_force_weeo, OracleBudget};
use edmrepair::space::verify_solution;
use edmrepair::{DistanceSpace, Geometry};

/// Labels of the repaired space, in order.
const KEPT: [&str; 8] = ["1", "2", "3", "4", "5", "6", "8", "9"];

/// A planar lattice realization of the repaired space.
fn lattice() -> Vec<Vec<f64>> {
    vec![
        vec![1.0, 1.0],
        vec![0.0, 1.0],
        vec![1.0, 0.0],
        vec![0.0, 0.0],
        vec![-1.0, 1.0],
        vec![-1.0, 0.0],
        vec![1.0, -1.0],
        vec![0.0, -1.0],
    ]
}

#[test]
fn repaired_space_is_the_lattice() {
    let rep = paper_repaired();
    assert_eq!(rep.labels(), KEPT.map(String::from));
    assert_eq!(rep.rows(), DistanceSpace::from_points(&lattice()).rows());
    for g in [Geometry::default(), Geometry::exact()] {
        assert!(g.is_embeddable(&rep, &rep.points(), 2));
        assert!(!g.is_embeddable(&rep, &rep.points(), 1));
        assert_eq!(g.embedding_dim(&rep, &rep.points()), Some(2));
    }
}

#[test]
fn witness_applied_gives_repaired_space() {
    let inst = paper_example();
    let w = paper_witness();
    assert_eq!(inst.space.sq(0, 1), 7.0);
    assert_eq!(inst.space.sq(2, 4), 11.0);
    let applied = inst.space.apply_modifications(&w.modifications).unwrap();
    let survivors = w.survivors(inst.n());
    let rep = paper_repaired();
    for (a, &i) in survivors.iter().enumerate() {
        for (b, &j) in survivors.iter().enumerate() {
            assert_eq!(applied.sq(i, j), rep.sq(a, b));
        }
    }
    for g in [Geometry::default(), Geometry::exact()] {
        assert_eq!(verify_solution(&g, &inst, &w), Ok(()));
    }
}

#[test]
fn original_space_needs_repair() {
    let inst = paper_example();
    let g = Geometry::exact();
    assert!(!g.is_embeddable(&inst.space, &inst.space.points(), 2));
    let without_7: Vec<usize> = (0..9).filter(|&i| i != 6).collect();
    assert!(!g.is_embeddable(&inst.space, &without_7, 2));
}

#[test]
fn optimum_costs_three() {
    let inst = paper_example();
    let oracle = brute_force_weeo(&inst, &OracleBudget::default()).unwrap().expect("witness fits the budget");
    assert_eq!(oracle.cost, 3);
    let cheaper = brute_force_weeo(&inst.clone().with_budget(2), &OracleBudget::default()).unwrap();
    assert!(cheaper.is_none());

    let out = solve_weeo(&Geometry::default(), &inst, &WeeoOptions::default()).unwrap();
    let sol = out.solution.expect("yes instance");
    assert_eq!(sol.cost, 3);
    assert_eq!(verify_solution(&Geometry::default(), &inst, &sol), Ok(()));
    let r = sol.realization.as_ref().expect("realized");
    let survivors = sol.survivors(inst.n());
    let rep = inst.space.apply_modifications(&sol.modifications).unwrap();
    assert!(r.max_relative_error(&rep, &survivors) < 1e-6);
}
