//! Weighted outlier deletion plus distance modification.
//!
//! After compression, guesses (Z_O, Z_M) are tried in order of increasing
//! cost; the pairs of Z_M become free and the feasibility backend decides
//! whether the rest embeds in R^d.

use std::collections::{BTreeMap, BTreeSet};

use super::compress::{compress, CompressionTrace, Verdict};
use crate::error::{Error, Result};
use crate::feasibility::{feasible_with_free_pairs, FreePairProblem};
use crate::geometry::{Backend, Geometry};
use crate::space::{solution_cost, Pair, Solution, WeightedInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeeoOptions {
    pub seed: u64,
    pub restarts: usize,
    /// Upper limit on the number of guesses materialized.
    pub max_guesses: usize,
    pub compress: bool,
}

impl Default for WeeoOptions {
    fn default() -> Self {
        Self { seed: 0, restarts: 20, max_guesses: 20_000_000, compress: true }
    }
}

/// The guess that produced a solution, in original indices.
#[derive(Debug, Clone, PartialEq)]
pub struct GuessTuple {
    pub z_o: Vec<usize>,
    pub z_m: Vec<Pair>,
    /// Dimension of the witness's affine span.
    pub r: usize,
    /// Independent points spanning the witness.
    pub anchors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeeoOutcome {
    pub solution: Option<Solution>,
    pub compression: Option<CompressionTrace>,
    pub guesses_tried: usize,
    pub guess: Option<GuessTuple>,
}

fn subsets_upto(items: usize, k: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(start: usize, items: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if cur.len() == k {
            return;
        }
        for i in start..items {
            cur.push(i);
            rec(i + 1, items, k, cur, out);
            cur.pop();
        }
    }
    rec(0, items, k, &mut Vec::new(), out);
}

struct Guess {
    cost: u64,
    z_o: Vec<usize>,
    z_m: Vec<Pair>,
}

/// All guesses within the cardinality and weight budgets, sorted by cost,
/// then size, then lexicographically.
fn guesses(inst: &WeightedInstance, limit: usize) -> Result<Vec<Guess>> {
    let n = inst.n();
    let mut outs = Vec::new();
    subsets_upto(n, inst.k_out, &mut outs);
    let mut all = Vec::new();
    for z_o in outs {
        let c_o: u64 = z_o.iter().map(|&i| inst.outlier_weight(i)).sum();
        if c_o > inst.budget {
            continue;
        }
        let rest: Vec<usize> = (0..n).filter(|i| !z_o.contains(i)).collect();
        let pairs: Vec<Pair> = rest
            .iter()
            .enumerate()
            .flat_map(|(a, &i)| rest[a + 1..].iter().map(move |&j| Pair(i, j)))
            .collect();
        let mut mods = Vec::new();
        subsets_upto(pairs.len(), inst.k_mod, &mut mods);
        for m in mods {
            let z_m: Vec<Pair> = m.iter().map(|&i| pairs[i]).collect();
            let cost = c_o + z_m.iter().map(|&p| inst.pair_weight(p)).sum::<u64>();
            if cost <= inst.budget {
                all.push(Guess { cost, z_o: z_o.clone(), z_m });
                if all.len() > limit {
                    return Err(Error::TooLarge(format!("more than {limit} guesses")));
                }
            }
        }
    }
    all.sort_by(|a, b| {
        (a.cost, a.z_o.len() + a.z_m.len(), &a.z_o, &a.z_m).cmp(&(b.cost, b.z_o.len() + b.z_m.len(), &b.z_o, &b.z_m))
    });
    Ok(all)
}

/// Cheapest feasible guess on `inst` itself (no compression), in its indices.
pub(crate) fn search(
    geom: &Geometry,
    inst: &WeightedInstance,
    seed: u64,
    restarts: usize,
    limit: usize,
) -> Result<(Option<(Solution, GuessTuple)>, usize)> {
    let mut tried = 0;
    for g in guesses(inst, limit)? {
        tried += 1;
        let keep: Vec<usize> = (0..inst.n()).filter(|i| !g.z_o.contains(i)).collect();
        let local: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(a, &i)| (i, a)).collect();
        let free: BTreeSet<Pair> = g.z_m.iter().map(|p| Pair(local[&p.lo()], local[&p.hi()])).collect();
        let prob = FreePairProblem::new(inst.space.induced(&keep), free, inst.d)
            .with_seed(seed)
            .with_restarts(restarts);
        let Some(w) = feasible_with_free_pairs(geom, &prob) else { continue };
        let modifications: BTreeMap<Pair, f64> =
            w.free_values.iter().map(|(p, &v)| (Pair(keep[p.lo()], keep[p.hi()]), v)).collect();
        let mut sol = Solution { outliers: g.z_o.iter().copied().collect(), modifications, realization: None, cost: 0 };
        sol.cost = solution_cost(inst, &sol);
        let repaired = prob.space.apply_modifications(&w.free_values)?;
        let anchors: Vec<usize> = geom
            .basis(&repaired, &(0..keep.len()).collect::<Vec<_>>())
            .unwrap_or_default()
            .into_iter()
            .map(|a| keep[a])
            .collect();
        let r = anchors.len().saturating_sub(1);
        return Ok((Some((sol, GuessTuple { z_o: g.z_o, z_m: g.z_m, r, anchors })), tried));
    }
    Ok((None, tried))
}

fn attach_realization(geom: &Geometry, inst: &WeightedInstance, mut sol: Solution) -> Solution {
    if let Ok(repaired) = inst.space.apply_modifications(&sol.modifications) {
        // modified values come from floating-point witnesses
        let g = if sol.modifications.is_empty() { *geom } else { Geometry::new(geom.tol, Backend::Float) };
        sol.realization = g.realize(&repaired, &sol.survivors(inst.n()), inst.d);
    }
    sol
}

pub fn solve_weeo(geom: &Geometry, inst: &WeightedInstance, opts: &WeeoOptions) -> Result<WeeoOutcome> {
    if !opts.compress {
        let (found, tried) = search(geom, inst, opts.seed, opts.restarts, opts.max_guesses)?;
        let (solution, guess) = match found {
            Some((s, g)) => (Some(attach_realization(geom, inst, s)), Some(g)),
            None => (None, None),
        };
        return Ok(WeeoOutcome { solution, compression: None, guesses_tried: tried, guess });
    }
    let trace = compress(geom, inst);
    match &trace.verdict {
        Verdict::No => Ok(WeeoOutcome { solution: None, compression: Some(trace), guesses_tried: 0, guess: None }),
        Verdict::Yes(sol) => {
            let sol = attach_realization(geom, inst, sol.clone());
            Ok(WeeoOutcome { solution: Some(sol), compression: Some(trace), guesses_tried: 0, guess: None })
        }
        Verdict::Reduced(reduced) => {
            let (found, tried) = search(geom, reduced, opts.seed, opts.restarts, opts.max_guesses)?;
            let mut out = WeeoOutcome { solution: None, compression: None, guesses_tried: tried, guess: None };
            if let Some((local, g)) = found {
                let lifted = trace.lift(inst, &local);
                let map = |i: usize| trace.kept[i];
                out.guess = Some(GuessTuple {
                    z_o: g.z_o.iter().map(|&i| map(i)).collect(),
                    z_m: g.z_m.iter().map(|p| Pair::new(map(p.lo()), map(p.hi())).expect("distinct")).collect(),
                    r: g.r,
                    anchors: g.anchors.iter().map(|&i| map(i)).collect(),
                });
                out.solution = Some(attach_realization(geom, inst, lifted));
            }
            out.compression = Some(trace);
            Ok(out)
        }
    }
}
