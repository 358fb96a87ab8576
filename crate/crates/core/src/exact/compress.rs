//! Compression of a weighted instance to O((kd)²) points.
//!
//! Pipeline: greedy hitting set A, a size check, a partition of Y = X ∖ A
//! into metric bases, forced deletions of points of A (Rules 3 and 4), and
//! finally a marking step that keeps A plus the parts that can matter.

use std::collections::{BTreeMap, BTreeSet};

use super::partition::{is_pair_x_compatible, is_x_compatible, partition_into_bases, BasisPartition};
use crate::approx::greedy_outliers;
use crate::geometry::Geometry;
use crate::space::{Solution, WeightedInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingRule {
    /// No x-equivalence class of C_{h*} is large.
    SmallClasses,
    /// Too many parts conflict with the large class.
    ManyIncompatible,
}

/// x-equivalence classes of the x-compatible parts of C_{h*}.
#[derive(Debug, Clone, PartialEq)]
pub struct XClasses {
    /// Each class lists part indices in increasing order; classes ordered by
    /// their smallest member.
    pub classes: Vec<Vec<usize>>,
    /// Parts in C_h, h ≤ h*, pair-incompatible with some member of the large
    /// class (filled once the large class is known).
    pub conflicting: Vec<usize>,
}

impl XClasses {
    /// The class of size ≥ `min`, if any (at most one can exceed half).
    pub fn large(&self, min: usize) -> Option<&Vec<usize>> {
        self.classes.iter().filter(|c| c.len() >= min).max_by_key(|c| (c.len(), std::cmp::Reverse(c[0])))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    No,
    /// Solved outright; solution is in original indices.
    Yes(Solution),
    /// Equivalent smaller instance over `kept` (original indices, sorted).
    Reduced(WeightedInstance),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionTrace {
    pub hitting_set: Vec<usize>,
    pub small_instance: bool,
    pub partition: Option<BasisPartition>,
    pub forced: Vec<(usize, ForcingRule)>,
    pub equivalence: BTreeMap<usize, XClasses>,
    /// Set when a pairwise check fails transitivity; the original instance is
    /// returned unchanged in that case.
    pub not_transitive: Option<usize>,
    pub marked: Vec<usize>,
    pub marking_completed: bool,
    pub kept: Vec<usize>,
    pub verdict: Verdict,
}

impl CompressionTrace {
    /// Maps a solution of the reduced instance back to original indices and
    /// adds the forced outliers.
    pub fn lift(&self, original: &WeightedInstance, sol: &Solution) -> Solution {
        let outliers: BTreeSet<usize> = self
            .forced
            .iter()
            .map(|&(x, _)| x)
            .chain(sol.outliers.iter().map(|&i| self.kept[i]))
            .collect();
        let modifications = sol
            .modifications
            .iter()
            .map(|(p, &v)| {
                let (a, b) = (self.kept[p.lo()], self.kept[p.hi()]);
                (crate::space::Pair::new(a, b).expect("distinct kept points"), v)
            })
            .collect();
        let mut out = Solution { outliers, modifications, realization: None, cost: 0 };
        out.cost = crate::space::solution_cost(original, &out);
        out
    }
}

struct State<'a> {
    geom: &'a Geometry,
    inst: &'a WeightedInstance,
    part: BasisPartition,
    h_star: usize,
    // per x: compatible parts of C_{h*} and the pairwise matrix among them
    compat: BTreeMap<usize, XClasses>,
}

impl State<'_> {
    fn emb_pair(&self, i: usize, j: usize, x: usize) -> bool {
        is_pair_x_compatible(self.geom, &self.inst.space, &self.part.parts[i], &self.part.parts[j], x, self.inst.d)
    }

    /// Classes for x, or `Err(x)` if pairwise compatibility is not transitive.
    fn classes_for(&self, x: usize) -> Result<XClasses, usize> {
        let d = self.inst.d;
        let comp: Vec<usize> = self
            .part
            .class(self.h_star)
            .iter()
            .copied()
            .filter(|&i| is_x_compatible(self.geom, &self.inst.space, &self.part.parts[i], x, d))
            .collect();
        let m = comp.len();
        let mut rel = vec![vec![true; m]; m];
        for a in 0..m {
            for b in a + 1..m {
                let ok = self.emb_pair(comp[a], comp[b], x);
                rel[a][b] = ok;
                rel[b][a] = ok;
            }
        }
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if rel[a][b] && rel[b][c] && !rel[a][c] {
                        return Err(x);
                    }
                }
            }
        }
        let mut seen = vec![false; m];
        let mut classes = Vec::new();
        for a in 0..m {
            if seen[a] {
                continue;
            }
            let class: Vec<usize> = (a..m).filter(|&b| rel[a][b]).collect();
            for &b in &class {
                seen[b] = true;
            }
            classes.push(class.into_iter().map(|b| comp[b]).collect());
        }
        Ok(XClasses { classes, conflicting: Vec::new() })
    }

    /// Parts of C_h, h ≤ h*, pair-incompatible with some member of `large`.
    fn conflicts(&self, x: usize, large: &[usize]) -> Vec<usize> {
        let mut out = Vec::new();
        for (&h, idx) in &self.part.size_classes {
            if h > self.h_star {
                continue;
            }
            for &j in idx {
                if large.iter().any(|&i| i != j && !self.emb_pair(i, j, x)) {
                    out.push(j);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Runs the compression pipeline.
pub fn compress(geom: &Geometry, inst: &WeightedInstance) -> CompressionTrace {
    let d = inst.d;
    let (k_o, k_m) = (inst.k_out, inst.k_mod);
    let k = k_o + k_m;
    let n = inst.n();
    let a = greedy_outliers(geom, &inst.space, d);
    let mut trace = CompressionTrace {
        hitting_set: a.iter().copied().collect(),
        small_instance: false,
        partition: None,
        forced: Vec::new(),
        equivalence: BTreeMap::new(),
        not_transitive: None,
        marked: Vec::new(),
        marking_completed: false,
        kept: (0..n).collect(),
        verdict: Verdict::Reduced(inst.clone()),
    };
    if a.len() > (d + 3) * k {
        trace.verdict = Verdict::No;
        return trace;
    }
    let y: Vec<usize> = (0..n).filter(|i| !a.contains(i)).collect();
    let weight = k_o + 2 * k_m;
    if y.len() <= 2 * weight * (d + 1) * (d + 1) {
        trace.small_instance = true;
        return trace;
    }
    if a.is_empty() {
        trace.verdict = Verdict::Yes(super::branching::finish(geom, inst, Vec::new()));
        return trace;
    }
    let part = partition_into_bases(geom, &inst.space, &y, d).expect("complement of a d-outlier set embeds");
    // |Y| > 2w(d+1)² guarantees some class reaches 2w+1 parts
    let h_star = part.largest_class_at_least(2 * weight + 1).expect("a large size class exists");
    let mut part = part;
    part.h_star = Some(h_star);
    let mut st = State { geom, inst, part, h_star, compat: BTreeMap::new() };
    for &x in &a {
        match st.classes_for(x) {
            Ok(c) => {
                st.compat.insert(x, c);
            }
            Err(x) => {
                trace.not_transitive = Some(x);
                trace.partition = Some(st.part);
                return trace;
            }
        }
    }

    let mut alive: Vec<usize> = a.iter().copied().collect();
    let mut k_cur = k_o as i64;
    let mut w_cur = inst.budget as i128;
    let c_star = st.part.class(h_star).len();
    loop {
        let w_now = (k_cur + 2 * k_m as i64) as usize;
        let mut fired = None;
        // Rule 3
        for &x in &alive {
            let max_class = st.compat[&x].classes.iter().map(Vec::len).max().unwrap_or(0);
            if max_class + w_now < c_star {
                fired = Some((x, ForcingRule::SmallClasses));
                break;
            }
        }
        // Rule 4
        if fired.is_none() {
            for &x in &alive {
                let large = st.compat[&x].large(c_star - w_now).cloned().expect("Rule 3 leaves a large class");
                let conf = st.conflicts(x, &large);
                let fires = conf.len() > k_cur as usize + k_m;
                st.compat.get_mut(&x).expect("present").conflicting = conf;
                if fires {
                    fired = Some((x, ForcingRule::ManyIncompatible));
                    break;
                }
            }
        }
        let Some((x, rule)) = fired else { break };
        alive.retain(|&v| v != x);
        trace.forced.push((x, rule));
        k_cur -= 1;
        w_cur -= inst.outlier_weight(x) as i128;
        // Rule 2
        if k_cur < 0 || w_cur < 0 {
            trace.partition = Some(st.part);
            trace.equivalence = st.compat;
            trace.verdict = Verdict::No;
            return trace;
        }
        if alive.is_empty() {
            let forced: Vec<usize> = trace.forced.iter().map(|&(x, _)| x).collect();
            trace.partition = Some(st.part);
            trace.equivalence = st.compat;
            trace.verdict = Verdict::Yes(super::branching::finish(geom, inst, forced));
            return trace;
        }
    }

    // marking
    let w_now = (k_cur + 2 * k_m as i64) as usize;
    let mut marked: BTreeSet<usize> = BTreeSet::new();
    for (&h, idx) in &st.part.size_classes {
        if h > h_star {
            marked.extend(idx);
        }
    }
    for &x in &alive {
        let cls = &st.compat[&x];
        let large = cls.large(c_star - w_now).expect("Rule 3 leaves a large class");
        marked.extend(large.iter().take(w_now + 1));
        marked.extend(&cls.conflicting);
    }
    let mut kept: Vec<usize> = alive.clone();
    for &i in &marked {
        kept.extend(&st.part.parts[i]);
    }
    kept.sort_unstable();
    let mut reduced = inst.sub_instance(&kept);
    reduced.k_out = k_cur as usize;
    reduced.budget = w_cur as u64;
    trace.marked = marked.into_iter().collect();
    trace.marking_completed = true;
    trace.kept = kept;
    trace.partition = Some(st.part);
    trace.equivalence = st.compat;
    trace.verdict = Verdict::Reduced(reduced);
    trace
}

/// 9(k_O + k_M)²(d+3)².
pub fn size_bound(k_out: usize, k_mod: usize, d: usize) -> usize {
    9 * (k_out + k_mod).pow(2) * (d + 3).pow(2)
}
