//! Command-line front end. Exit codes: 0 yes/ok, 1 no, 2 error.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::approx::{greedy_outliers, two_approx_outliers, default_trials};
use crate::error::{Error, Result};
use crate::exact::{alg1_branch, alg2_branch, compress, size_bound, solve_eeo, solve_weeo, Verdict, WeeoOptions};
use crate::generators::{
    maxcut_reduction, overbudget_gadget, paper_example, planted_instance, rank_reduction, vc_reduction, NoiseKind,
    PlantedSpec,
};
use crate::geometry::{Backend, Geometry};
use crate::graph::Graph;
use crate::io::{
    instance_json, read_instance, read_matrix_csv, round12, write_text, Answer, InstanceFile, Meta, Modification,
    SolutionFile,
};
use crate::oracle::{
    brute_force_eeo, brute_force_maxcut, brute_force_vertex_cover, brute_force_weeo_seeded,
    brute_force_column_deletion, OracleBudget,
};
use crate::space::{solution_cost, Solution, WeightedInstance};

#[derive(Parser, Debug)]
#[command(name = "edmrepair", version, about = "Euclidean embedding with outlier deletion and distance modification")]
pub struct Cli {
    /// Use exact rational arithmetic for the embeddability tests.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveAlgo {
    Alg1,
    Alg2,
    /// Outlier-only instances go to the Alg-1/Alg-2 dispatcher, the rest to weeo.
    Auto,
    Weeo,
    Brute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ApproxAlgo {
    Greedy,
    TwoApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Planted,
    Vc,
    Maxcut,
    Rank,
    Paper,
    Gadget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleProblem {
    Instance,
    VertexCover,
    Maxcut,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Test whether the whole space embeds and print a realization.
    Check {
        input: PathBuf,
        /// Target dimension; defaults to the instance's d.
        #[arg(long)]
        dim: Option<usize>,
        /// Require the space to need exactly this dimension.
        #[arg(long)]
        strong: bool,
        /// Input is a headerless CSV of squared distances.
        #[arg(long)]
        matrix_csv: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve an instance exactly.
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SolveAlgo::Auto)]
        algo: SolveAlgo,
        #[arg(long, env = "EDMREPAIR_SEED", default_value_t = 0)]
        seed: u64,
        /// Starts for the numeric feasibility search.
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long)]
        matrix_csv: bool,
        /// Dimension for CSV input.
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Approximate outlier set, ignoring k_out.
    Approx {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ApproxAlgo::Greedy)]
        algo: ApproxAlgo,
        #[arg(long, env = "EDMREPAIR_SEED", default_value_t = 0)]
        seed: u64,
        /// Trials per dimension guess; defaults to 2^(d+1).
        #[arg(long)]
        trials: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reduce an instance to an equivalent smaller one.
    Compress {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a generated instance (and its ground truth, when known).
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        k_out: usize,
        #[arg(long, default_value_t = 0)]
        k_mod: usize,
        #[arg(long, default_value_t = 10.0)]
        half_width: f64,
        #[arg(long)]
        perturbed: bool,
        /// Graph JSON {"n": .., "edges": [[a, b], ..]} for vc and maxcut.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Matrix JSON (array of rows) for rank.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        #[arg(long, default_value_t = 1)]
        h: usize,
        #[arg(long, env = "EDMREPAIR_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Ground-truth path; defaults to the output with `.truth.json`.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Exhaustive reference answers for small inputs.
    Oracle {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OracleProblem::Instance)]
        problem: OracleProblem,
        #[arg(long, env = "EDMREPAIR_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Outcome of a subcommand: exit code plus a human-readable report.
struct Done {
    code: u8,
    report: String,
}

fn done(code: u8, report: impl Into<String>) -> Result<Done> {
    Ok(Done { code, report: report.into() })
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    run(cli)
}

pub fn run(cli: Cli) -> ExitCode {
    if cli.threads > 0 {
        // fails only if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let geom = if cli.exact { Geometry::exact() } else { Geometry::default() };
    let result = match cli.command {
        Command::Check { input, dim, strong, matrix_csv, output } => {
            check(&geom, &input, dim, strong, matrix_csv, output.as_deref())
        }
        Command::Solve { input, algo, seed, restarts, matrix_csv, dim, output } => {
            solve(&geom, &input, algo, seed, restarts, matrix_csv.then_some(dim), output.as_deref())
        }
        Command::Approx { input, algo, seed, trials, output } => {
            approx(&geom, &input, algo, seed, trials, output.as_deref())
        }
        Command::Compress { input, output } => compress_cmd(&geom, &input, output.as_deref()),
        Command::Generate { kind, n, d, k_out, k_mod, half_width, perturbed, graph, matrix, k, ell, h, seed, output, truth } => {
            let g = GenArgs { kind, n, d, k_out, k_mod, half_width, perturbed, graph, matrix, k, ell, h, seed };
            generate(&g, output.as_deref(), truth.as_deref())
        }
        Command::Oracle { input, problem, seed, output } => oracle_cmd(&input, problem, seed, output.as_deref()),
    };
    match result {
        Ok(d) => {
            if !d.report.is_empty() {
                println!("{}", d.report);
            }
            ExitCode::from(d.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(output: Option<&Path>, json: &str) -> Result<()> {
    match output {
        Some(p) => write_text(p, json),
        None => Ok(()),
    }
}

fn load(input: &Path, csv_dim: Option<usize>) -> Result<WeightedInstance> {
    match csv_dim {
        Some(d) => WeightedInstance::unit(read_matrix_csv(input)?, d, 0, 0),
        None => read_instance(input),
    }
}

fn fmt_point(c: &[f64]) -> String {
    let parts: Vec<String> = c.iter().map(|&x| round12(x).to_string()).collect();
    format!("({})", parts.join(", "))
}

#[derive(Serialize)]
struct CheckReport {
    embeddable: bool,
    dim: usize,
    strong: bool,
    embedding_dim: Option<usize>,
    max_relative_error: Option<f64>,
    realization: Option<Vec<Vec<f64>>>,
}

fn check(
    geom: &Geometry,
    input: &Path,
    dim: Option<usize>,
    strong: bool,
    matrix_csv: bool,
    output: Option<&Path>,
) -> Result<Done> {
    let space = if matrix_csv { read_matrix_csv(input)? } else { read_instance(input)?.space };
    let dim = match dim {
        Some(d) => d,
        None if matrix_csv => return Err(Error::InvalidSpec("--dim is required with --matrix-csv".into())),
        None => read_instance(input)?.d,
    };
    let pts = space.points();
    let ok = if strong {
        geom.is_strongly_embeddable(&space, &pts, dim as isize)
    } else {
        geom.is_embeddable(&space, &pts, dim as isize)
    };
    let real = if ok { Geometry::new(geom.tol, Backend::Float).realize(&space, &pts, dim) } else { None };
    let err = real.as_ref().map(|r| r.max_relative_error(&space, &pts));
    let coords: Option<Vec<Vec<f64>>> =
        real.as_ref().map(|r| pts.iter().map(|p| r.coords[p].iter().map(|&x| round12(x)).collect()).collect());
    let report = CheckReport { embeddable: ok, dim, strong, embedding_dim: geom.embedding_dim(&space, &pts), max_relative_error: err, realization: coords.clone() };
    emit(output, &serde_json::to_string_pretty(&report).expect("serializable"))?;
    let mut text = format!(
        "{} {}-embeddable ({} points)",
        if ok { "yes:" } else { "no: not" },
        dim,
        space.len()
    );
    if strong {
        text.push_str(", strong");
    }
    if let (Some(c), Some(e)) = (&coords, err) {
        text.push_str(&format!("\nmax relative distance error {e:.3e}"));
        for (p, x) in pts.iter().zip(c) {
            text.push_str(&format!("\n{}\t{}", space.label(*p), fmt_point(x)));
        }
    }
    done(if ok { 0 } else { 1 }, text)
}

fn summarize(inst: &WeightedInstance, file: &SolutionFile) -> String {
    match file.answer {
        Answer::No => format!("no: no solution within k_out = {}, k_mod = {}, W = {}", inst.k_out, inst.k_mod, inst.budget),
        Answer::Yes => {
            let mut s = format!("yes: cost {}", file.cost);
            s.push_str(&format!("\noutliers: [{}]", file.outliers.join(", ")));
            for Modification { pair, old_sq, new_sq } in &file.modifications {
                s.push_str(&format!("\nmodify {},{}: {old_sq} -> {}", pair[0], pair[1], round12(*new_sq)));
            }
            s
        }
    }
}

fn finish_solution(
    inst: &WeightedInstance,
    sol: Option<Solution>,
    meta: Meta,
    output: Option<&Path>,
) -> Result<Done> {
    let file = match &sol {
        Some(s) => SolutionFile::from_solution(inst, Answer::Yes, s, meta),
        None => SolutionFile::no(meta),
    };
    emit(output, &file.to_json())?;
    done(if sol.is_some() { 0 } else { 1 }, summarize(inst, &file))
}

fn solve(
    geom: &Geometry,
    input: &Path,
    algo: SolveAlgo,
    seed: u64,
    restarts: usize,
    csv_dim: Option<usize>,
    output: Option<&Path>,
) -> Result<Done> {
    let inst = load(input, csv_dim)?;
    let start = Instant::now();
    let (name, sol) = match algo {
        SolveAlgo::Alg1 => ("alg1", alg1_branch(geom, &inst)?),
        SolveAlgo::Alg2 => ("alg2", alg2_branch(geom, &inst, &[])?),
        SolveAlgo::Auto if inst.k_mod == 0 => ("auto", solve_eeo(geom, &inst)?),
        SolveAlgo::Auto | SolveAlgo::Weeo => {
            let opts = WeeoOptions { seed, restarts, ..WeeoOptions::default() };
            ("weeo", solve_weeo(geom, &inst, &opts)?.solution)
        }
        SolveAlgo::Brute => {
            let b = OracleBudget::default();
            if inst.k_mod == 0 {
                ("brute", brute_force_eeo(&inst, &b)?)
            } else {
                ("brute", brute_force_weeo_seeded(&inst, &b, seed)?)
            }
        }
    };
    let meta = Meta { algorithm: name.into(), seed: Some(seed), elapsed_ms: start.elapsed().as_millis() as u64, trials: None };
    finish_solution(&inst, sol, meta, output)
}

fn approx(
    geom: &Geometry,
    input: &Path,
    algo: ApproxAlgo,
    seed: u64,
    trials: Option<usize>,
    output: Option<&Path>,
) -> Result<Done> {
    let inst = read_instance(input)?;
    let start = Instant::now();
    let (name, set, trials): (&str, BTreeSet<usize>, Option<usize>) = match algo {
        ApproxAlgo::Greedy => ("greedy", greedy_outliers(geom, &inst.space, inst.d), None),
        ApproxAlgo::TwoApprox => {
            if inst.k_mod > 0 || !inst.is_unit_weighted() {
                return Err(Error::InvalidSpec("two-approx takes unweighted outlier-only instances".into()));
            }
            let t = trials.unwrap_or_else(|| default_trials(inst.d));
            ("two-approx", two_approx_outliers(geom, &inst.space, inst.d, seed, Some(t)), Some(t))
        }
    };
    let mut sol = Solution::outliers_only(&inst, set);
    sol.cost = solution_cost(&inst, &sol);
    sol.realization = Geometry::new(geom.tol, Backend::Float).realize(&inst.space, &sol.survivors(inst.n()), inst.d);
    // the set always repairs the space; it answers the instance only within budget
    let within = sol.outliers.len() <= inst.k_out && sol.cost <= inst.budget;
    let meta = Meta { algorithm: name.into(), seed: Some(seed), elapsed_ms: start.elapsed().as_millis() as u64, trials };
    let file = SolutionFile::from_solution(&inst, if within { Answer::Yes } else { Answer::No }, &sol, meta);
    emit(output, &file.to_json())?;
    let text = format!(
        "{} outliers: [{}]{}",
        file.outliers.len(),
        file.outliers.join(", "),
        if within { "" } else { " (exceeds the instance budget)" }
    );
    done(0, text)
}

#[derive(Serialize)]
struct CompressReport {
    verdict: &'static str,
    original_points: usize,
    kept: Vec<String>,
    forced_outliers: Vec<String>,
    hitting_set: Vec<String>,
    small_instance: bool,
    not_transitive: bool,
    marking_completed: bool,
    size_bound: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<InstanceFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solution: Option<SolutionFile>,
}

fn compress_cmd(geom: &Geometry, input: &Path, output: Option<&Path>) -> Result<Done> {
    let inst = read_instance(input)?;
    let start = Instant::now();
    let trace = compress(geom, &inst);
    let labels = |v: &mut dyn Iterator<Item = usize>| v.map(|i| inst.space.label(i).to_string()).collect::<Vec<_>>();
    let (verdict, code, instance, solution) = match &trace.verdict {
        Verdict::No => ("no", 1, None, None),
        Verdict::Yes(s) => {
            let meta = Meta { algorithm: "compress".into(), seed: None, elapsed_ms: start.elapsed().as_millis() as u64, trials: None };
            ("yes", 0, None, Some(SolutionFile::from_solution(&inst, Answer::Yes, s, meta)))
        }
        Verdict::Reduced(r) => ("reduced", 0, Some(InstanceFile::from_instance(r)), None),
    };
    let report = CompressReport {
        verdict,
        original_points: inst.n(),
        kept: labels(&mut trace.kept.iter().copied()),
        forced_outliers: labels(&mut trace.forced.iter().map(|f| f.0)),
        hitting_set: labels(&mut trace.hitting_set.iter().copied()),
        small_instance: trace.small_instance,
        not_transitive: trace.not_transitive.is_some(),
        marking_completed: trace.marking_completed,
        size_bound: size_bound(inst.k_out, inst.k_mod, inst.d),
        instance,
        solution,
    };
    emit(output, &serde_json::to_string_pretty(&report).expect("serializable"))?;
    let text = format!(
        "{verdict}: kept {} of {} points, {} forced outliers",
        report.kept.len(),
        inst.n(),
        report.forced_outliers.len()
    );
    done(code, text)
}

struct GenArgs {
    kind: Kind,
    n: usize,
    d: usize,
    k_out: usize,
    k_mod: usize,
    half_width: f64,
    perturbed: bool,
    graph: Option<PathBuf>,
    matrix: Option<PathBuf>,
    k: usize,
    ell: usize,
    h: usize,
    seed: u64,
}

/// Ground truth written next to a generated instance.
#[derive(Debug, Serialize)]
struct TruthFile {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    answer: Option<Answer>,
    /// `true` when the planted cost is confirmed optimal; otherwise an upper bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    optimal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    solution: Option<SolutionFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_value: Option<usize>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))
}

fn need<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| Error::InvalidSpec(format!("--{flag} is required for this kind")))
}

fn answer(b: bool) -> Answer {
    if b {
        Answer::Yes
    } else {
        Answer::No
    }
}

fn generate(g: &GenArgs, output: Option<&Path>, truth_path: Option<&Path>) -> Result<Done> {
    let meta = || Meta { algorithm: "planted".into(), seed: Some(g.seed), elapsed_ms: 0, trials: None };
    let (inst, truth) = match g.kind {
        Kind::Planted => {
            let spec = PlantedSpec {
                half_width: g.half_width,
                noise: if g.perturbed { NoiseKind::Perturbed } else { NoiseKind::RandomInconsistent },
                ..PlantedSpec::new(g.n, g.d, g.k_out, g.k_mod, g.seed)
            };
            let (inst, t) = planted_instance(&spec)?;
            let sol = SolutionFile::from_solution(&inst, Answer::Yes, &t.solution, meta());
            let truth = TruthFile { kind: "planted", answer: Some(Answer::Yes), optimal: Some(t.optimal), solution: Some(sol), witness_value: None };
            (inst, Some(truth))
        }
        Kind::Vc => {
            let graph: Graph = read_json(need(&g.graph, "graph")?)?;
            let inst = vc_reduction(&graph, g.k)?;
            let truth = brute_force_vertex_cover(&graph).ok().map(|vc| TruthFile {
                kind: "vc",
                answer: Some(answer(vc.len() <= g.k)),
                optimal: None,
                solution: None,
                witness_value: Some(vc.len()),
            });
            (inst, truth)
        }
        Kind::Maxcut => {
            let graph: Graph = read_json(need(&g.graph, "graph")?)?;
            let inst = maxcut_reduction(&graph, g.ell)?;
            let truth = brute_force_maxcut(&graph).ok().map(|mc| TruthFile {
                kind: "maxcut",
                answer: Some(answer(mc >= g.ell)),
                optimal: None,
                solution: None,
                witness_value: Some(mc),
            });
            (inst, truth)
        }
        Kind::Rank => {
            let m: Vec<Vec<f64>> = read_json(need(&g.matrix, "matrix")?)?;
            let inst = rank_reduction(&m, g.h, g.k)?;
            let truth = brute_force_column_deletion(&m, g.h, g.k).ok().map(|yes| TruthFile {
                kind: "rank",
                answer: Some(answer(yes)),
                optimal: None,
                solution: None,
                witness_value: None,
            });
            (inst, truth)
        }
        Kind::Paper => (paper_example(), None),
        Kind::Gadget => (overbudget_gadget(), Some(TruthFile { kind: "gadget", answer: Some(Answer::No), optimal: None, solution: None, witness_value: None })),
    };
    let json = instance_json(&inst);
    match output {
        Some(p) => {
            write_text(p, &json)?;
            if let Some(t) = &truth {
                let tp = truth_path.map(Path::to_path_buf).unwrap_or_else(|| p.with_extension("truth.json"));
                write_text(&tp, &serde_json::to_string_pretty(t).expect("serializable"))?;
            }
            done(0, format!("wrote {} points (d = {}) to {}", inst.n(), inst.d, p.display()))
        }
        None => done(0, json),
    }
}

fn oracle_cmd(input: &Path, problem: OracleProblem, seed: u64, output: Option<&Path>) -> Result<Done> {
    match problem {
        OracleProblem::Instance => {
            let inst = read_instance(input)?;
            let start = Instant::now();
            let b = OracleBudget::default();
            let sol = if inst.k_mod == 0 { brute_force_eeo(&inst, &b)? } else { brute_force_weeo_seeded(&inst, &b, seed)? };
            let meta = Meta { algorithm: "oracle".into(), seed: Some(seed), elapsed_ms: start.elapsed().as_millis() as u64, trials: None };
            finish_solution(&inst, sol, meta, output)
        }
        OracleProblem::VertexCover => {
            let g: Graph = read_json(input)?;
            let vc = brute_force_vertex_cover(&g)?;
            let json = serde_json::json!({ "size": vc.len(), "cover": vc });
            emit(output, &json.to_string())?;
            done(0, format!("minimum vertex cover {} : {:?}", vc.len(), vc))
        }
        OracleProblem::Maxcut => {
            let g: Graph = read_json(input)?;
            let mc = brute_force_maxcut(&g)?;
            emit(output, &serde_json::json!({ "maxcut": mc }).to_string())?;
            done(0, format!("maximum cut {mc}"))
        }
    }
}
