//! Command line front end.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use resclique_core::bottleneck::{frugal_useful_pair, sample_path, side_sets, PathSampleConfig};
use resclique_core::cnf::{encode_clique, encode_clique_block, encode_weak, AxiomKind, CnfFormula, VarMap};
use resclique_core::construct::{build_search_program, refute_colourable, refute_homomorphic, Homomorphism};
use resclique_core::denseness::{derive_parameters, is_clique_dense, DensenessParams, WMode, DEFAULT_BUDGET};
use resclique_core::graph::{balanced_partition, greedy_colouring, sample_er, sample_gnp, ErParams, Graph, Partition};
use resclique_core::proof::{verify_refutation, ResolutionProof};
use resclique_core::robp::{check_read_once, robp_to_refutation, verify_search_program, BranchingProgram};
use resclique_core::solvers::{cliquer_with, extract_robp_cliquer, extract_robp_maxclique, max_clique_bb_with, SolverOptions};
use resclique_core::{Error as CoreError, VertexSet};

use crate::experiment::{run_experiment, summarize, write_csv, AlgoName, ExperimentConfig};
use crate::formats::{self, Encoding};

#[derive(Parser, Debug)]
#[command(name = "resclique", version, about = "Clique formulas, read-once branching programs and regular resolution")]
pub struct Cli {
    /// Worker threads for parallel commands (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a seeded random graph.
    GenGraph(GenGraphArgs),
    /// Write a clique formula for a graph.
    GenCnf(GenCnfArgs),
    /// Build a regular refutation of the weak encoding.
    BuildProof(BuildProofArgs),
    /// Check a refutation or a search program against a formula.
    Verify(VerifyArgs),
    /// Find a maximum (or transversal) clique.
    Solve(SolveArgs),
    /// Check clique-denseness of a graph under a balanced partition.
    CheckDense(CheckDenseArgs),
    /// Sample random paths through a block-encoding program.
    SamplePaths(SamplePathsArgs),
    /// Run a scaling experiment and write CSV.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
pub struct GenGraphArgs {
    #[arg(long)]
    pub n: usize,
    /// Clique parameter for the edge probability n^(-2ξ/(k-1)).
    #[arg(long, required_unless_present = "p")]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub xi: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use this edge probability instead of the one derived from k and ξ.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenCnfArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Encoding::Map)]
    pub encoding: Encoding,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Method {
    /// Search program over the clique index of the graph.
    Alg1,
    /// Via a greedy colouring with fewer than k colours.
    Colour,
    /// Via a homomorphism into a k-clique-free target graph.
    Hom,
}

#[derive(Args, Debug)]
pub struct BuildProofArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Method::Alg1)]
    pub method: Method,
    /// Target graph for `--method hom`.
    #[arg(long, required_if_eq("method", "hom"))]
    pub target: Option<PathBuf>,
    /// Homomorphism for `--method hom`: the 1-based image of every vertex, whitespace separated.
    #[arg(long, required_if_eq("method", "hom"))]
    pub map: Option<PathBuf>,
    #[arg(long)]
    pub proof: PathBuf,
    /// Also write the search program (`--method alg1` only).
    #[arg(long)]
    pub robp: Option<PathBuf>,
    /// Also write the weak encoding the proof refutes.
    #[arg(long)]
    pub cnf: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub cnf: PathBuf,
    #[arg(long, conflicts_with = "robp", required_unless_present = "robp")]
    pub proof: Option<PathBuf>,
    #[arg(long)]
    pub robp: Option<PathBuf>,
    /// Also require the refutation to be regular.
    #[arg(long)]
    pub regular: bool,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgoName::Cliquer)]
    pub algo: AlgoName,
    /// Stop as soon as a clique of this size is found.
    #[arg(long)]
    pub k: Option<usize>,
    /// Search for a transversal k-clique of the balanced k-partition.
    #[arg(long, requires = "k")]
    pub blocks: bool,
    /// Write the branching program extracted from the search (needs --blocks).
    #[arg(long, requires = "blocks")]
    pub extract: Option<PathBuf>,
    /// Write the block encoding the extracted program refers to.
    #[arg(long, requires = "extract")]
    pub cnf: Option<PathBuf>,
    /// Disable all pruning rules.
    #[arg(long)]
    pub no_prune: bool,
}

#[derive(Args, Debug)]
pub struct CheckDenseArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1.0)]
    pub xi: f64,
    #[arg(long, default_value_t = 0.2)]
    pub epsilon: f64,
    /// Range property 2 over every vertex subset (small graphs only).
    #[arg(long, conflicts_with = "w_file")]
    pub exhaustive: bool,
    /// Candidate sets W, one 1-based vertex list per line.
    #[arg(long)]
    pub w_file: Option<PathBuf>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, env = "RESCLIQUE_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Debug)]
pub struct SamplePathsArgs {
    #[arg(long)]
    pub robp: PathBuf,
    /// Block encoding with its header.
    #[arg(long)]
    pub cnf: PathBuf,
    /// The graph; without it, edges are read off the edge axioms (edges inside a block are lost).
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub s: f64,
    #[arg(long, default_value_t = 0.2)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// With r and q, also look for a frugally traversed useful pair on each path.
    #[arg(long, requires_all = ["r", "q"])]
    pub t: Option<f64>,
    #[arg(long, requires = "t")]
    pub r: Option<f64>,
    #[arg(long, requires = "t")]
    pub q: Option<f64>,
    #[arg(long, env = "RESCLIQUE_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Exit status 1: the input was read fine but did not verify.
pub const EXIT_REJECTED: u8 = 1;
/// Exit status 2: bad usage or unreadable input.
pub const EXIT_USAGE: u8 = 2;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn load_graph(path: &Path) -> Result<Graph> {
    formats::read_graph(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn vertices_1based(vs: impl IntoIterator<Item = usize>) -> String {
    vs.into_iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ")
}

/// Runs a parsed command line and returns the process exit status.
pub fn run(cli: Cli) -> Result<u8> {
    if let Some(j) = cli.jobs {
        ensure!(j > 0, "--jobs must be positive");
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().ok();
    }
    match cli.command {
        Command::GenGraph(a) => gen_graph(a),
        Command::GenCnf(a) => gen_cnf(a),
        Command::BuildProof(a) => build_proof(a),
        Command::Verify(a) => verify(a),
        Command::Solve(a) => solve(a),
        Command::CheckDense(a) => check_dense(a),
        Command::SamplePaths(a) => sample_paths(a),
        Command::Experiment(a) => experiment(a),
    }
}

fn gen_graph(a: GenGraphArgs) -> Result<u8> {
    let g = match (a.p, a.k) {
        (Some(p), _) => sample_gnp(a.n, p, a.seed)?,
        (None, Some(k)) => sample_er(&ErParams { n: a.n, k, xi: a.xi, seed: a.seed })?,
        (None, None) => bail!("need --k or --p"),
    };
    emit(a.out.as_deref(), &formats::write_graph(&g))?;
    Ok(0)
}

fn gen_cnf(a: GenCnfArgs) -> Result<u8> {
    let g = load_graph(&a.graph)?;
    let text = match a.encoding {
        Encoding::Map => formats::write_cnf(&encode_clique(&g, a.k, true)?, Some(Encoding::Map), None),
        Encoding::Weak => formats::write_cnf(&encode_weak(&g, a.k)?, Some(Encoding::Weak), None),
        Encoding::Block => {
            let part = balanced_partition(g.n(), a.k)?;
            formats::write_cnf(&encode_clique_block(&g, &part)?, Some(Encoding::Block), Some(&part))
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(0)
}

fn build_proof(a: BuildProofArgs) -> Result<u8> {
    let g = load_graph(&a.graph)?;
    ensure!(a.robp.is_none() || matches!(a.method, Method::Alg1), "--robp is only available with --method alg1");
    let (proof, nodes): (ResolutionProof, usize) = match a.method {
        Method::Alg1 => {
            let sp = build_search_program(&g, a.k)?;
            let pi = robp_to_refutation(&sp.program, &sp.formula)?;
            if let Some(p) = &a.robp {
                emit(Some(p), &formats::write_robp(&sp.program))?;
            }
            (pi, sp.program.len())
        }
        Method::Colour => {
            let colouring = greedy_colouring(&g);
            let used = colouring.iter().max().map_or(0, |&c| c + 1);
            ensure!(a.k >= 2 && used < a.k, "greedy colouring uses {used} colours, need fewer than k = {}", a.k);
            let r = refute_colourable(&g, &colouring, a.k)?;
            (r.proof, r.program_nodes)
        }
        Method::Hom => {
            let h = load_graph(a.target.as_deref().ok_or_else(|| anyhow!("--target is required"))?)?;
            let map_path = a.map.as_deref().ok_or_else(|| anyhow!("--map is required"))?;
            let map = read(map_path)?
                .split_whitespace()
                .map(|t| {
                    let v: usize = t.parse().map_err(|_| anyhow!("bad vertex `{t}` in {}", map_path.display()))?;
                    ensure!((1..=h.n()).contains(&v), "image {v} out of range");
                    Ok(v - 1)
                })
                .collect::<Result<Vec<_>>>()?;
            let hom = Homomorphism::new(&g, &h, map)?;
            let r = refute_homomorphic(&g, &h, &hom, a.k)?;
            (r.proof, r.program_nodes)
        }
    };
    emit(Some(&a.proof), &formats::write_proof(&proof))?;
    if let Some(p) = &a.cnf {
        emit(Some(p), &formats::write_cnf(&encode_weak(&g, a.k)?, Some(Encoding::Weak), None))?;
    }
    eprintln!("program nodes {nodes}, proof length {}", proof.len());
    Ok(0)
}

fn describe(e: &CoreError) -> String {
    match e {
        CoreError::InvalidProof { step, reason } => format!("step {}: {reason}", step + 1),
        CoreError::NotReadOnce { node, var } => format!("node {}: variable {var} queried twice on a path", node + 1),
        other => other.to_string(),
    }
}

fn verify(a: VerifyArgs) -> Result<u8> {
    let cnf = formats::read_cnf(&read(&a.cnf)?).with_context(|| format!("parsing {}", a.cnf.display()))?;
    let f = &cnf.formula;
    if let Some(path) = &a.proof {
        let pi = match formats::read_proof(&read(path)?) {
            Ok(pi) => pi,
            Err(e) => {
                println!("REJECTED: {e:#}");
                return Ok(EXIT_REJECTED);
            }
        };
        return Ok(match verify_refutation(&pi, f, a.regular) {
            Ok(()) => {
                println!("OK: refutation of {} steps{}", pi.len(), if a.regular { ", regular" } else { "" });
                0
            }
            Err(e) => {
                println!("REJECTED: {}", describe(&e));
                EXIT_REJECTED
            }
        });
    }
    let path = a.robp.as_deref().ok_or_else(|| anyhow!("need --proof or --robp"))?;
    let p = match formats::read_robp(&read(path)?) {
        Ok(p) => p,
        Err(e) => {
            println!("REJECTED: {e:#}");
            return Ok(EXIT_REJECTED);
        }
    };
    let checked = check_read_once(&p).and_then(|()| verify_search_program(&p, f));
    Ok(match checked {
        Ok(()) => {
            println!("OK: read-once search program with {} nodes", p.len());
            0
        }
        Err(e) => {
            println!("REJECTED: {}", describe(&e));
            EXIT_REJECTED
        }
    })
}

fn solve(a: SolveArgs) -> Result<u8> {
    let g = load_graph(&a.graph)?;
    let part = if a.blocks {
        Some(balanced_partition(g.n(), a.k.ok_or_else(|| anyhow!("--blocks needs --k"))?)?)
    } else {
        None
    };
    let opts = SolverOptions { prune: !a.no_prune, trace: false };
    let sol = match a.algo {
        AlgoName::Cliquer => cliquer_with(&g, part.as_ref(), a.k, opts),
        AlgoName::Bb => max_clique_bb_with(&g, part.as_ref(), a.k, opts),
    };
    println!("clique {}: {}", sol.clique.len(), vertices_1based(sol.clique.iter().copied()));
    println!("tree nodes {}", sol.stats.tree_nodes());
    if let (Some(out), Some(part)) = (&a.extract, &part) {
        if sol.clique.len() >= part.k() {
            eprintln!("a transversal clique exists; nothing to extract");
            return Ok(EXIT_REJECTED);
        }
        let ex = match a.algo {
            AlgoName::Cliquer => extract_robp_cliquer(&g, part)?,
            AlgoName::Bb => extract_robp_maxclique(&g, part)?,
        };
        emit(Some(out), &formats::write_robp(&ex.program))?;
        if let Some(c) = &a.cnf {
            emit(Some(c), &formats::write_cnf(&ex.formula, Some(Encoding::Block), Some(part)))?;
        }
        println!("extracted program nodes {}", ex.program.len());
    }
    Ok(0)
}

fn check_dense(a: CheckDenseArgs) -> Result<u8> {
    let g = load_graph(&a.graph)?;
    let part = balanced_partition(g.n(), a.k)?;
    let derived = derive_parameters(g.n(), a.k, a.xi, a.epsilon);
    let params = if a.t.is_some() || a.r.is_some() || a.q.is_some() || a.s.is_some() {
        let base = derived.ok();
        let pick = |x: Option<f64>, d: Option<f64>, name: &str| x.or(d).ok_or_else(|| anyhow!("--{name} is required here"));
        DensenessParams::custom(
            a.k,
            pick(a.t, base.map(|b| b.t), "t")?,
            pick(a.r, base.map(|b| b.r), "r")?,
            pick(a.q, base.map(|b| b.q), "q")?,
            pick(a.s, base.map(|b| b.s), "s")?,
            a.epsilon,
        )?
    } else {
        derived?
    };
    let mode = if a.exhaustive {
        WMode::Exhaustive
    } else if let Some(p) = &a.w_file {
        let sets = formats::read_vertex_sets(&read(p)?, g.n())?;
        WMode::Candidates(sets.into_iter().map(|s| VertexSet::from_iter(g.n(), s)).collect())
    } else {
        WMode::Candidates(Vec::new())
    };
    let rep = is_clique_dense(&g, &part, &params, &mode, a.budget)?;
    let p = rep.params;
    println!("t={} r={} r'={} q={} q'={} s={} epsilon={}", p.t, p.r, p.r_prime, p.q, p.q_prime, p.s, p.epsilon);
    for v in &rep.parameter_violations {
        println!("note: {v}");
    }
    for (i, b) in rep.blocks.iter().enumerate() {
        match &b.counterexample {
            None => println!("block {}: dense", i + 1),
            Some(r) => println!("block {}: sparse at R = {{{}}}", i + 1, vertices_1based(r.iter().copied())),
        }
    }
    println!("property 1: {}", if rep.property1 { "holds" } else { "fails" });
    println!("W checked {}, dense {}, witnessed {}", rep.w_checked, rep.w_dense, rep.w_witnessed);
    for f in rep.failures.iter().take(10) {
        println!("no witness for W = {{{}}}", vertices_1based(f.w.iter()));
    }
    println!("property 2: {}", if rep.property2 { "holds" } else { "fails" });
    println!("clique-dense: {}", if rep.clique_dense() { "yes" } else { "no" });
    Ok(0)
}

/// Rebuilds a graph from the edge axioms of a block encoding. Pairs inside a
/// block come out non-adjacent.
fn graph_from_block_formula(f: &CnfFormula, part: &Partition) -> Result<Graph> {
    let n = part.n();
    let mut missing = vec![VertexSet::new(n); n];
    for (i, c) in f.clauses().iter().enumerate() {
        if f.kind(i) == AxiomKind::Edge {
            let (u, v) = (c.lits()[0].var().index() - 1, c.lits()[1].var().index() - 1);
            missing[u].insert(v);
            missing[v].insert(u);
        }
    }
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    let edges: Vec<_> = edges.filter(|&(u, v)| part.block_of(u) != part.block_of(v) && !missing[u].contains(v)).collect();
    Ok(Graph::from_edges(n, edges)?)
}

#[derive(serde::Serialize)]
struct PathRow {
    sample: usize,
    ones: usize,
    forced: usize,
    forced_ones: usize,
    sink_clause: usize,
    sink_kind: String,
    useful: Option<bool>,
}

fn sample_paths(a: SamplePathsArgs) -> Result<u8> {
    let cnf = formats::read_cnf(&read(&a.cnf)?).with_context(|| format!("parsing {}", a.cnf.display()))?;
    let part = match (&cnf.partition, cnf.formula.var_map()) {
        (Some(p), VarMap::Block { .. }) => p.clone(),
        _ => bail!("{} is not a block encoding with a resclique header", a.cnf.display()),
    };
    let p: BranchingProgram = formats::read_robp(&read(&a.robp)?)?;
    let g = match &a.graph {
        Some(path) => load_graph(path)?,
        None => graph_from_block_formula(&cnf.formula, &part)?,
    };
    ensure!(g.n() == part.n(), "graph has {} vertices, formula has {}", g.n(), part.n());
    verify_search_program(&p, &cnf.formula).map_err(|e| anyhow!("program does not verify: {}", describe(&e)))?;
    let cfg = PathSampleConfig::new(a.s, a.epsilon, a.seed)?;
    let sides = side_sets(&p, &part)?;
    let mut cache = BTreeMap::new();
    let mut rows = Vec::with_capacity(a.samples);
    for j in 0..a.samples {
        let sp = sample_path(&p, &g, &part, &sides, &cfg, &mut cfg.rng(j as u64))?;
        let path = &sp.path;
        let useful = match (a.t, a.r, a.q) {
            (Some(t), Some(r), Some(q)) => {
                Some(frugal_useful_pair(path, &g, &sides, part.k(), t, r, q, a.budget, &mut cache)?.is_some())
            }
            _ => None,
        };
        rows.push(PathRow {
            sample: j,
            ones: path.ones(),
            forced: path.forced.iter().filter(|&&f| f).count(),
            forced_ones: path.forced.iter().zip(&path.answers).filter(|&(&f, &x)| f && x).count(),
            sink_clause: sp.sink_clause + 1,
            sink_kind: match cnf.formula.kind(sp.sink_clause) {
                AxiomKind::Clique(i) => format!("clique{}", i + 1),
                AxiomKind::Edge => "edge".into(),
                AxiomKind::Functionality => "functionality".into(),
                AxiomKind::Other => "other".into(),
            },
            useful,
        });
    }
    let clique_sinks = rows.iter().filter(|r| r.sink_kind.starts_with("clique")).count();
    let max_ones = rows.iter().map(|r| r.ones).max().unwrap_or(0);
    let forced_ones: usize = rows.iter().map(|r| r.forced_ones).sum();
    eprintln!("samples {}, clique sinks {clique_sinks}, max ones {max_ones}, forced ones {forced_ones}", rows.len());
    if a.t.is_some() {
        let hits = rows.iter().filter(|r| r.useful == Some(true)).count();
        eprintln!("frugal useful pair on {hits} of {} paths", rows.len());
    }
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    emit(a.out.as_deref(), std::str::from_utf8(&buf)?)?;
    Ok(0)
}

fn experiment(a: ExperimentArgs) -> Result<u8> {
    let cfg: ExperimentConfig =
        toml::from_str(&read(&a.config)?).with_context(|| format!("parsing {}", a.config.display()))?;
    let res = run_experiment(&cfg)?;
    let file = fs::File::create(&a.out).with_context(|| format!("writing {}", a.out.display()))?;
    write_csv(&res.rows, io::BufWriter::new(file))?;
    for e in &res.failures {
        eprintln!("instance failed: {e}");
    }
    println!("rows {}, rejected {}, failed {}", res.rows.len(), res.rejected, res.failures.len());
    for ((algo, k, n), s) in summarize(&res.rows) {
        let robp = s.robp_nodes.map_or("-".to_string(), |x| x.to_string());
        println!("{algo} k={k} n={n}: {} instances, median tree nodes {}, median program nodes {robp}", s.instances, s.treenodes);
    }
    Ok(0)
}
