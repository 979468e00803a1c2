//! Seeded scaling runs: sample, reject, solve, extract, verify, record.

use std::collections::BTreeMap;
use std::io::Write;

use anyhow::{ensure, Result};
use rayon::prelude::*;
use resclique_core::graph::{balanced_partition, has_transversal_clique, sample_er, ErParams};
use resclique_core::proof::verify_refutation;
use resclique_core::robp::robp_to_refutation;
use resclique_core::solvers::{cliquer_with, extract_robp_cliquer, extract_robp_maxclique, max_clique_bb_with, SolverOptions};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AlgoName {
    Cliquer,
    Bb,
}

impl std::fmt::Display for AlgoName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AlgoName::Cliquer => "cliquer",
            AlgoName::Bb => "bb",
        })
    }
}

fn default_algos() -> Vec<AlgoName> {
    vec![AlgoName::Cliquer, AlgoName::Bb]
}

fn default_true() -> bool {
    true
}

/// Experiment description, usually read from TOML.
///
/// ```toml
/// ns = [20, 30, 40, 50]
/// ks = [3, 4]
/// xi = 1.5
/// seeds = 30
/// algos = ["cliquer", "bb"]
/// extract = true
/// ```
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ns: Vec<usize>,
    pub ks: Vec<usize>,
    pub xi: f64,
    /// Number of seeds per (n, k); seeds run from `first_seed`.
    pub seeds: u64,
    #[serde(default)]
    pub first_seed: u64,
    #[serde(default = "default_algos")]
    pub algos: Vec<AlgoName>,
    #[serde(default = "default_true")]
    pub extract: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.xi.is_finite() && self.xi > 0.0, "xi must be positive");
        ensure!(self.ks.iter().all(|&k| k >= 2), "every k must be at least 2");
        ensure!(self.ns.iter().all(|&n| n >= 1), "every n must be positive");
        Ok(())
    }

    /// All (n, k, seed) triples, in a fixed order.
    pub fn instances(&self) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::new();
        for &k in &self.ks {
            for &n in &self.ns {
                for seed in self.first_seed..self.first_seed + self.seeds {
                    out.push((n, k, seed));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: usize,
    pub k: usize,
    pub xi: f64,
    pub seed: u64,
    pub algo: AlgoName,
    pub treenodes: u64,
    pub robp_nodes: Option<usize>,
    pub proof_len: Option<usize>,
    pub verified: bool,
}

/// What happened to one (n, k, seed) instance.
#[derive(Clone, Debug)]
pub enum Outcome {
    /// The sample contains a transversal k-clique.
    Rejected,
    Rows(Vec<Row>),
    Failed(String),
}

fn run_algo(n: usize, k: usize, xi: f64, seed: u64, algo: AlgoName, extract: bool) -> Result<Row> {
    let g = sample_er(&ErParams { n, k, xi, seed })?;
    let part = balanced_partition(n, k)?;
    let mut row = Row { n, k, xi, seed, algo, treenodes: 0, robp_nodes: None, proof_len: None, verified: false };
    if !extract {
        let opts = SolverOptions { prune: true, trace: false };
        let sol = match algo {
            AlgoName::Cliquer => cliquer_with(&g, Some(&part), Some(k), opts),
            AlgoName::Bb => max_clique_bb_with(&g, Some(&part), Some(k), opts),
        };
        ensure!(sol.clique.len() < k, "solver found a transversal clique the oracle missed");
        row.treenodes = sol.stats.tree_nodes();
        row.verified = true;
        return Ok(row);
    }
    let ex = match algo {
        AlgoName::Cliquer => extract_robp_cliquer(&g, &part)?,
        AlgoName::Bb => extract_robp_maxclique(&g, &part)?,
    };
    let pi = robp_to_refutation(&ex.program, &ex.formula)?;
    verify_refutation(&pi, &ex.formula, true)?;
    row.treenodes = ex.stats.tree_nodes();
    row.robp_nodes = Some(ex.program.len());
    row.proof_len = Some(pi.len());
    row.verified = true;
    Ok(row)
}

/// Runs one instance with every configured algorithm.
pub fn run_instance(cfg: &ExperimentConfig, n: usize, k: usize, seed: u64) -> Outcome {
    let sample = sample_er(&ErParams { n, k, xi: cfg.xi, seed }).and_then(|g| Ok((g, balanced_partition(n, k)?)));
    let (g, part) = match sample {
        Ok(x) => x,
        Err(e) => return Outcome::Failed(e.to_string()),
    };
    if has_transversal_clique(&g, &part) {
        return Outcome::Rejected;
    }
    let mut rows = Vec::new();
    for &algo in &cfg.algos {
        match run_algo(n, k, cfg.xi, seed, algo, cfg.extract) {
            Ok(r) => rows.push(r),
            Err(e) => {
                eprintln!("n={n} k={k} seed={seed} {algo}: {e:#}");
                rows.push(Row {
                    n,
                    k,
                    xi: cfg.xi,
                    seed,
                    algo,
                    treenodes: 0,
                    robp_nodes: None,
                    proof_len: None,
                    verified: false,
                });
            }
        }
    }
    Outcome::Rows(rows)
}

#[derive(Clone, Debug, Default)]
pub struct ExperimentResult {
    pub rows: Vec<Row>,
    pub rejected: usize,
    pub failures: Vec<String>,
}

/// Runs every instance in parallel; rows come back in instance order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let outcomes: Vec<_> = cfg.instances().into_par_iter().map(|(n, k, seed)| run_instance(cfg, n, k, seed)).collect();
    let mut res = ExperimentResult::default();
    for o in outcomes {
        match o {
            Outcome::Rejected => res.rejected += 1,
            Outcome::Rows(r) => res.rows.extend(r),
            Outcome::Failed(e) => res.failures.push(e),
        }
    }
    Ok(res)
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["n", "k", "xi", "seed", "algo", "treenodes", "robp_nodes", "proof_len", "verified"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(text: &str) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<std::result::Result<Vec<Row>, _>>()?)
}

/// Median of a non-empty list (mean of the middle pair for even lengths).
pub fn median(xs: &mut [f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    Some(if xs.len() % 2 == 1 { xs[m] } else { (xs[m - 1] + xs[m]) / 2.0 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub instances: usize,
    pub treenodes: f64,
    pub robp_nodes: Option<f64>,
}

/// Medians per (algo, k, n) over verified rows.
pub fn summarize(rows: &[Row]) -> BTreeMap<(AlgoName, usize, usize), Summary> {
    let mut groups: BTreeMap<_, Vec<&Row>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.verified) {
        groups.entry((r.algo, r.k, r.n)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(key, rs)| {
            let mut t: Vec<f64> = rs.iter().map(|r| r.treenodes as f64).collect();
            let mut p: Vec<f64> = rs.iter().filter_map(|r| r.robp_nodes.map(|x| x as f64)).collect();
            let s = Summary { instances: rs.len(), treenodes: median(&mut t).unwrap_or(0.0), robp_nodes: median(&mut p) };
            (key, s)
        })
        .collect()
}
