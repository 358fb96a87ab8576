//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{random_instance, rng, Mix};
use edmrepair::approx::{greedy_outliers, obstruction_set, two_approx_outliers};
use edmrepair::exact::{alg1_branch, alg2_branch, compress, size_bound, solve_eeo, solve_weeo, Verdict, WeeoOptions};
use edmrepair::generators::{
    maxcut_reduction, paper_example, paper_repaired, paper_witness, planted_instance, random_graph,
    random_sign_matrix, rank_reduction, vc_reduction, NoiseKind, PlantedSpec,
};
use edmrepair::geometry::{cm_det_exact, Geometry};
use edmrepair::io::{instance_json, Answer, SolutionFile};
use edmrepair::oracle::{
    brute_force_column_deletion, brute_force_eeo, brute_force_maxcut, brute_force_vertex_cover, brute_force_weeo,
    minimal_outlier_sets, rational_rank, OracleBudget,
};
use edmrepair::space::{pair_count, verify_solution};
use edmrepair::{DistanceSpace, Solution, WeightedInstance};
use num_rational::BigRational;
use num_traits::FromPrimitive;
use rand::Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() <= limit, || format!("took {:.1?}, limit {limit:?}", t.elapsed()))
}

fn cost(s: &Option<Solution>) -> Option<u64> {
    s.as_ref().map(|s| s.cost)
}

// 1
fn golden_example() -> Outcome {
    let t = Instant::now();
    let bin = env!("CARGO_BIN_EXE_edmrepair");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let inst = paper_example();
    let inst_path = dir.path().join("paper.json");
    let sol_path = dir.path().join("sol.json");
    std::fs::write(&inst_path, instance_json(&inst)).map_err(|e| e.to_string())?;
    let st = Command::new(bin)
        .args(["solve", "--algo", "weeo", "-o"])
        .arg(&sol_path)
        .arg(&inst_path)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(st.status.code() == Some(0), || format!("solve exit {:?}", st.status.code()))?;
    let file: SolutionFile =
        serde_json::from_str(&std::fs::read_to_string(&sol_path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(file.answer == Answer::Yes && file.cost <= 3, || format!("answer {:?} cost {}", file.answer, file.cost))?;
    let sol = file.to_solution(&inst).map_err(|e| e.to_string())?;
    ensure(verify_solution(&Geometry::default(), &inst, &sol).is_ok(), || "returned solution fails verification".into())?;
    for g in [Geometry::default(), Geometry::exact()] {
        verify_solution(&g, &inst, &paper_witness()).map_err(|e| format!("witness: {e}"))?;
    }
    let rep = WeightedInstance::unit(paper_repaired(), 2, 0, 0).map_err(|e| e.to_string())?;
    let rep_path = dir.path().join("repaired.json");
    let report_path = dir.path().join("check.json");
    std::fs::write(&rep_path, instance_json(&rep)).map_err(|e| e.to_string())?;
    let st = Command::new(bin)
        .args(["check", "--dim", "2", "-o"])
        .arg(&report_path)
        .arg(&rep_path)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(st.status.code() == Some(0), || format!("check exit {:?}", st.status.code()))?;
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let err = report["max_relative_error"].as_f64().ok_or("no error field")?;
    ensure(err < 1e-6, || format!("relative error {err:e}"))?;
    within(t, Duration::from_secs(5))?;
    Ok(format!("cost {}, D' relative error {err:.1e}, {:.2?}", file.cost, t.elapsed()))
}

// 2
fn oracle_agreement() -> Outcome {
    let t = Instant::now();
    let g = Geometry::default();
    let b = OracleBudget::default();
    let (mut yes, mut with_mods) = (0, 0);
    for seed in 0..200u64 {
        let inst = random_instance(seed, &Mix::default());
        let tag = || format!("seed {seed} (n={}, d={}, k_out={}, k_mod={})", inst.n(), inst.d, inst.k_out, inst.k_mod);
        let truth = if inst.k_mod == 0 { brute_force_eeo(&inst, &b) } else { brute_force_weeo(&inst, &b) }
            .map_err(|e| format!("{}: oracle {e}", tag()))?;
        let expected = cost(&truth);
        let mut answers: Vec<(&str, Option<Solution>)> = Vec::new();
        let weeo = solve_weeo(&g, &inst, &WeeoOptions { seed, ..WeeoOptions::default() }).map_err(|e| e.to_string())?;
        answers.push(("solve_weeo", weeo.solution));
        if inst.k_mod == 0 {
            answers.push(("alg1", alg1_branch(&g, &inst).map_err(|e| e.to_string())?));
            answers.push(("alg2", alg2_branch(&g, &inst, &[]).map_err(|e| e.to_string())?));
            answers.push(("solve_eeo", solve_eeo(&g, &inst).map_err(|e| e.to_string())?));
            answers.push(("brute_weeo", brute_force_weeo(&inst, &b).map_err(|e| e.to_string())?));
        } else {
            with_mods += 1;
        }
        for (name, sol) in &answers {
            ensure(cost(sol) == expected, || format!("{}: {name} cost {:?}, oracle {expected:?}", tag(), cost(sol)))?;
            if let Some(s) = sol {
                verify_solution(&g, &inst, s).map_err(|e| format!("{}: {name}: {e}", tag()))?;
            }
        }
        yes += expected.is_some() as usize;
    }
    within(t, Duration::from_secs(600))?;
    Ok(format!("200/200 agree ({yes} yes, {with_mods} with k_mod = 1), {:.1?}", t.elapsed()))
}

// 3
fn compression() -> Outcome {
    let t = Instant::now();
    let g = Geometry::default();
    let b = OracleBudget { max_points: 40, max_subsets: 10_000_000 };
    let oracle = |inst: &WeightedInstance| {
        if inst.k_mod == 0 {
            brute_force_eeo(inst, &b)
        } else {
            brute_force_weeo(inst, &b)
        }
        .map_err(|e| e.to_string())
    };
    let (mut reduced, mut decided, mut marked, mut shrunk) = (0, 0, 0, 0);
    for seed in 0..100u64 {
        let mut r = rng(10_000 + seed);
        let with_mod = r.gen_bool(0.3);
        let mix = Mix {
            n: if with_mod { 8..=20 } else { 8..=40 },
            d: 1..=2,
            k_out: if with_mod { 0..=1 } else { 1..=2 },
            k_mod: if with_mod { 1..=1 } else { 0..=0 },
            w_max: if r.gen_bool(0.5) { 1 } else { 3 },
            half_width: 3..=8,
        };
        let inst = random_instance(20_000 + seed, &mix);
        let tag = format!("seed {seed} (n={}, d={}, k_out={}, k_mod={})", inst.n(), inst.d, inst.k_out, inst.k_mod);
        let truth = oracle(&inst)?.is_some();
        let trace = compress(&g, &inst);
        match &trace.verdict {
            Verdict::No => {
                decided += 1;
                ensure(!truth, || format!("{tag}: compression says no, oracle yes"))?;
            }
            Verdict::Yes(sol) => {
                decided += 1;
                ensure(truth, || format!("{tag}: compression says yes, oracle no"))?;
                verify_solution(&g, &inst, sol).map_err(|e| format!("{tag}: {e}"))?;
            }
            Verdict::Reduced(small) => {
                reduced += 1;
                shrunk += (small.n() < inst.n()) as usize;
                let sub = oracle(small)?;
                ensure(sub.is_some() == truth, || format!("{tag}: reduced verdict {} vs {truth}", sub.is_some()))?;
                if let Some(s) = sub {
                    let lifted = trace.lift(&inst, &s);
                    verify_solution(&g, &inst, &lifted).map_err(|e| format!("{tag}: lifted {e}"))?;
                }
            }
        }
        if trace.marking_completed {
            marked += 1;
            let bound = size_bound(inst.k_out, inst.k_mod, inst.d);
            ensure(trace.kept.len() <= bound, || format!("{tag}: kept {} > bound {bound}", trace.kept.len()))?;
        }
    }
    within(t, Duration::from_secs(600))?;
    Ok(format!(
        "100/100 equivalent ({decided} decided, {reduced} reduced of which {shrunk} smaller, {marked} marked), {:.1?}",
        t.elapsed()
    ))
}

// 4
fn greedy_ratio() -> Outcome {
    let t = Instant::now();
    let g = Geometry::default();
    let exact = Geometry::exact();
    let b = OracleBudget::default();
    let (mut checked, mut seed, mut worst) = (0, 0u64, 0.0f64);
    while checked < 100 {
        seed += 1;
        let mix = Mix { k_mod: 0..=0, w_max: 1, ..Mix::default() };
        let mut inst = random_instance(30_000 + seed, &mix);
        inst.k_out = 3;
        let inst = inst.with_budget(u64::MAX);
        let Some(opt) = brute_force_eeo(&inst, &b).map_err(|e| e.to_string())? else { continue };
        let opt = opt.cost as usize;
        let a = greedy_outliers(&g, &inst.space, inst.d);
        let rest: Vec<usize> = (0..inst.n()).filter(|i| !a.contains(i)).collect();
        ensure(exact.is_embeddable(&inst.space, &rest, inst.d as isize), || format!("seed {seed}: residual not embeddable"))?;
        ensure(a.len() <= (inst.d + 3) * opt, || format!("seed {seed}: |A| = {} > (d+3)·{opt}", a.len()))?;
        if opt > 0 {
            worst = worst.max(a.len() as f64 / opt as f64);
        }
        checked += 1;
    }
    within(t, Duration::from_secs(300))?;
    Ok(format!("100/100 within (d+3)·Opt, worst ratio {worst:.2}, {:.1?}", t.elapsed()))
}

// 5
fn two_approximation() -> Outcome {
    const SEEDS: u64 = 10;
    let t = Instant::now();
    let g = Geometry::default();
    let exact = Geometry::exact();
    let b = OracleBudget::default();
    let (mut good, mut runs, mut worst) = (0usize, 0usize, 1.0f64);
    for inst_seed in 0..50u64 {
        let mix = Mix { k_mod: 0..=0, w_max: 1, ..Mix::default() };
        let mut inst = random_instance(40_000 + inst_seed, &mix);
        inst.k_out = inst.n();
        let inst = inst.with_budget(u64::MAX);
        let opt = brute_force_eeo(&inst, &b).map_err(|e| e.to_string())?.ok_or("no optimum")?.cost as usize;
        let mut hits = 0;
        for s in 0..SEEDS {
            let a = two_approx_outliers(&g, &inst.space, inst.d, 1000 * inst_seed + s, None);
            let rest: Vec<usize> = (0..inst.n()).filter(|i| !a.contains(i)).collect();
            ensure(exact.is_embeddable(&inst.space, &rest, inst.d as isize), || {
                format!("instance {inst_seed} seed {s}: infeasible output")
            })?;
            hits += (a.len() <= 2 * opt) as usize;
        }
        good += hits;
        runs += SEEDS as usize;
        worst = worst.min(hits as f64 / SEEDS as f64);
    }
    let rate = good as f64 / runs as f64;
    ensure(rate >= 0.4, || format!("≤ 2·Opt in {:.1}% of runs", 100.0 * rate))?;
    within(t, Duration::from_secs(600))?;
    Ok(format!(
        "feasible 500/500, ≤ 2·Opt in {:.1}% of runs (lowest instance {:.0}%), {:.1?}",
        100.0 * rate,
        100.0 * worst,
        t.elapsed()
    ))
}

// 6
fn geometry_kernel() -> Outcome {
    let t = Instant::now();
    let mut r = rng(6);
    for k in 0..1000 {
        let v = r.gen_range(0u64..1 << 40) as f64 / (1u64 << r.gen_range(0..20)) as f64;
        let s = DistanceSpace::from_rows(&[vec![0.0, v], vec![v, 0.0]]).map_err(|e| e.to_string())?;
        let det = cm_det_exact(&s, &[0, 1]).map_err(|e| e.to_string())?;
        let want = BigRational::from_f64(v).unwrap() * BigRational::from_integer(2.into());
        ensure(det == want, || format!("pair {k}: {det} != 2·{v}"))?;
    }
    let exact = Geometry::exact();
    for k in 0..1000 {
        let d = r.gen_range(1..=4);
        let m = r.gen_range(1..=d + 2);
        let pts: Vec<Vec<f64>> = (0..m).map(|_| (0..d).map(|_| r.gen_range(-5i32..=5) as f64).collect()).collect();
        let s = DistanceSpace::from_points(&pts);
        let det = exact.cm_det(&s, &s.points()).map_err(|e| e.to_string())?;
        // m points span at most r = m − 1 dimensions; (−1)^{r+1} = (−1)^m
        let signed = if m % 2 == 0 { det } else { -det };
        ensure(signed >= 0.0, || format!("subset {k}: (−1)^(r+1)·CM = {signed}"))?;
    }
    let g = Geometry::default();
    let mut worst = 0.0f64;
    for k in 0..200 {
        let d = r.gen_range(1..=4);
        let n = r.gen_range(1..=12);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| r.gen_range(-10.0..10.0)).collect()).collect();
        let s = DistanceSpace::from_points(&pts);
        let real = g.realize(&s, &s.points(), d).ok_or_else(|| format!("set {k}: no realization"))?;
        let e = real.max_relative_error(&s, &s.points());
        worst = worst.max(e);
        ensure(e < 1e-9, || format!("set {k}: relative error {e:e}"))?;
    }
    Ok(format!("pairs exact 1000/1000, signs 1000/1000, round trip worst {worst:.1e}, {:.1?}", t.elapsed()))
}

// 7
fn reductions() -> Outcome {
    let t = Instant::now();
    let b = OracleBudget { max_points: 16, max_subsets: 10_000_000 };
    let (mut vc_yes, mut mc_yes, mut rk_yes) = (0, 0, 0);
    for seed in 0..50u64 {
        let mut r = rng(70_000 + seed);
        let n = r.gen_range(2..=7);
        let graph = random_graph(n, r.gen_range(0.2..0.8), 70_000 + seed);
        let k = r.gen_range(0..=n);
        let vc = brute_force_vertex_cover(&graph).map_err(|e| e.to_string())?.len();
        let got = brute_force_eeo(&vc_reduction(&graph, k).map_err(|e| e.to_string())?, &b)
            .map_err(|e| e.to_string())?
            .is_some();
        ensure(got == (vc <= k), || format!("graph {seed}: vc {vc}, k {k}, reduction says {got}"))?;
        vc_yes += got as usize;

        let mc = brute_force_maxcut(&graph).map_err(|e| e.to_string())?;
        let slack = r.gen_range(0..=2).min(pair_count(n));
        let ell = pair_count(n) - slack;
        let got = brute_force_weeo(&maxcut_reduction(&graph, ell).map_err(|e| e.to_string())?, &b)
            .map_err(|e| e.to_string())?
            .is_some();
        ensure(got == (mc >= ell), || format!("graph {seed}: maxcut {mc}, ell {ell}, reduction says {got}"))?;
        mc_yes += got as usize;
    }
    let mut matrices = 0;
    let mut seed = 0u64;
    while matrices < 20 {
        seed += 1;
        let mut r = rng(80_000 + seed);
        let m = random_sign_matrix(r.gen_range(2..=4), r.gen_range(2..=6), 80_000 + seed);
        let rank = rational_rank(&m);
        if rank < 2 {
            continue;
        }
        let h = r.gen_range(1..rank);
        let k = r.gen_range(0..=2);
        let truth = brute_force_column_deletion(&m, h, k).map_err(|e| e.to_string())?;
        let got = brute_force_eeo(&rank_reduction(&m, h, k).map_err(|e| e.to_string())?, &b)
            .map_err(|e| e.to_string())?
            .is_some();
        ensure(got == truth, || format!("matrix {seed}: column deletion {truth}, reduction {got}"))?;
        rk_yes += got as usize;
        matrices += 1;
    }
    within(t, Duration::from_secs(900))?;
    Ok(format!(
        "vc 50/50 ({vc_yes} yes), maxcut 50/50 ({mc_yes} yes), rank 20/20 ({rk_yes} yes), {:.1?}",
        t.elapsed()
    ))
}

// 8
fn obstruction_hitting() -> Outcome {
    let t = Instant::now();
    let g = Geometry::default();
    let exact = Geometry::exact();
    let b = OracleBudget::default();
    let (mut checked, mut seed, mut sets) = (0, 0u64, 0);
    while checked < 100 {
        seed += 1;
        let mut r = rng(90_000 + seed);
        let n = r.gen_range(3..=9);
        let d = r.gen_range(1..=3);
        let spec = PlantedSpec {
            half_width: r.gen_range(2..=6) as f64,
            noise: if r.gen_bool(0.5) { NoiseKind::Perturbed } else { NoiseKind::RandomInconsistent },
            ..PlantedSpec::new(n, d, r.gen_range(1..=(n - 1).min(3)), 0, r.gen())
        };
        let (inst, _) = planted_instance(&spec).map_err(|e| e.to_string())?;
        let s = &inst.space;
        if exact.is_embeddable(s, &s.points(), d as isize) {
            continue;
        }
        let obs: BTreeSet<usize> =
            obstruction_set(&g, s, &s.points(), d).ok_or_else(|| format!("seed {seed}: no obstruction set"))?.into_iter().collect();
        for m in minimal_outlier_sets(s, d, &b).map_err(|e| e.to_string())? {
            ensure(!m.is_disjoint(&obs), || format!("seed {seed}: {obs:?} misses minimal set {m:?}"))?;
            sets += 1;
        }
        checked += 1;
    }
    Ok(format!("100/100 instances, {sets} minimal sets all hit, {:.1?}", t.elapsed()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("golden example", golden_example),
        ("oracle agreement", oracle_agreement),
        ("compression equivalence and size", compression),
        ("greedy ratio", greedy_ratio),
        ("2-approximation", two_approximation),
        ("geometry kernel", geometry_kernel),
        ("reduction ground truth", reductions),
        ("obstruction-set hitting", obstruction_hitting),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.iter().any(|x| *x == id || name.contains(x.as_str())) {
            continue;
        }
        match f() {
            Ok(detail) => println!("criterion {id} {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {id} {name}: FAIL ({why})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
