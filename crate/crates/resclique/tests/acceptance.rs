//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_RED` are reported but do not fail the run.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resclique::experiment::{run_experiment, summarize, AlgoName, ExperimentConfig};
use resclique_core::assignment::Assignment;
use resclique_core::bottleneck::{build_decision_tree_program, check_lemma_legitimate, sample_path, side_sets, PathSampleConfig};
use resclique_core::cnf::{encode_clique, encode_clique_block, encode_weak, restrict, AxiomKind, CnfFormula, Var};
use resclique_core::construct::{blow_up, build_search_program, clique_index, refute_colourable, refute_homomorphic, Homomorphism};
use resclique_core::denseness::{
    check_mostly_dense, greedy_witness, is_clique_dense, is_r_q_dense, DensenessParams, WMode, DEFAULT_BUDGET,
};
use resclique_core::graph::{
    balanced_partition, has_clique_of_size, has_transversal_clique, sample_er, sample_gnp, ErParams, Graph, Partition,
};
use resclique_core::proof::{restrict_proof, verify_refutation, ResolutionProof, Rule};
use resclique_core::robp::{check_read_once, path_of, robp_to_refutation, verify_search_program, BranchingProgram, Node};
use resclique_core::solvers::{cliquer, extract_robp_cliquer, extract_robp_maxclique, max_clique_bb};
use resclique_core::VertexSet;

const KNOWN_RED: &[usize] = &[11];

type Check = Result<String, String>;

macro_rules! check {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

// ---------------------------------------------------------------- oracles

fn graph_from_mask(n: usize, mask: u32) -> Graph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask >> bit & 1 == 1 {
                edges.push((u, v));
            }
            bit += 1;
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Satisfiability by trying every assignment, clauses as bit masks.
fn brute_sat(f: &CnfFormula) -> bool {
    let nv = f.num_vars();
    assert!(nv <= 24);
    let masks: Vec<(u32, u32)> = f
        .clauses()
        .iter()
        .map(|c| {
            c.lits().iter().fold((0, 0), |(p, q), l| {
                let b = 1u32 << (l.var().index() - 1);
                if l.is_positive() {
                    (p | b, q)
                } else {
                    (p, q | b)
                }
            })
        })
        .collect();
    (0u32..1 << nv).any(|a| masks.iter().all(|&(p, q)| a & p != 0 || !a & q != 0))
}

/// Cliques as bit masks, found by extending masks in increasing vertex order.
fn clique_masks(g: &Graph) -> Vec<u64> {
    let n = g.n();
    let nb: Vec<u64> = (0..n).map(|v| g.neighbours(v).iter().fold(0u64, |m, u| m | 1 << u)).collect();
    let mut out = vec![0u64];
    let mut i = 0;
    while i < out.len() {
        let m = out[i];
        let start = if m == 0 { 0 } else { 64 - m.leading_zeros() as usize };
        let common = (0..n).filter(|&v| m >> v & 1 == 1).fold(u64::MAX, |c, v| c & nb[v]);
        for v in start..n {
            if common >> v & 1 == 1 {
                out.push(m | 1 << v);
            }
        }
        i += 1;
    }
    out
}

/// `|I(G)|`: distinct common neighbourhoods of cliques.
fn index_size(g: &Graph) -> usize {
    let n = g.n();
    let nb: Vec<u64> = (0..n).map(|v| g.neighbours(v).iter().fold(0u64, |m, u| m | 1 << u)).collect();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let set: BTreeSet<u64> =
        clique_masks(g).into_iter().map(|m| (0..n).filter(|&v| m >> v & 1 == 1).fold(all, |c, v| c & nb[v])).collect();
    set.len()
}

/// Bron–Kerbosch with pivoting.
fn bk_max(g: &Graph) -> usize {
    fn go(g: &Graph, r: usize, mut p: BTreeSet<usize>, mut x: BTreeSet<usize>, best: &mut usize) {
        if p.is_empty() && x.is_empty() {
            *best = (*best).max(r);
            return;
        }
        if r + p.len() <= *best {
            return;
        }
        let pivot = *p.iter().chain(x.iter()).max_by_key(|&&u| p.iter().filter(|&&w| g.has_edge(u, w)).count()).unwrap();
        let cand: Vec<usize> = p.iter().copied().filter(|&v| !g.has_edge(pivot, v)).collect();
        for v in cand {
            let np = p.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
            let nx = x.iter().copied().filter(|&w| g.has_edge(v, w)).collect();
            go(g, r + 1, np, nx, best);
            p.remove(&v);
            x.insert(v);
        }
    }
    let mut best = 0;
    go(g, 0, (0..g.n()).collect(), BTreeSet::new(), &mut best);
    best
}

/// Step-by-step resolution check on plain integer clauses.
fn independent_check(pi: &ResolutionProof, f: &CnfFormula) -> Result<(), String> {
    let axioms: BTreeSet<Vec<i32>> = f.clauses().iter().map(|c| c.lits().iter().map(|l| l.to_dimacs()).collect()).collect();
    let mut clauses: Vec<BTreeSet<i32>> = Vec::new();
    let mut resolved: Vec<BTreeSet<usize>> = Vec::new();
    for (j, s) in pi.steps().iter().enumerate() {
        let c: BTreeSet<i32> = s.clause.lits().iter().map(|l| l.to_dimacs()).collect();
        match s.rule {
            Rule::Axiom => {
                let found = axioms.iter().any(|a| a.iter().copied().collect::<BTreeSet<_>>() == c);
                check!(found, "step {j}: not an axiom");
                resolved.push(BTreeSet::new());
            }
            Rule::Resolve { pos, neg, var } => {
                check!(pos < j && neg < j, "step {j}: forward reference");
                let x = var.index() as i32;
                check!(clauses[pos].contains(&x) && clauses[neg].contains(&-x), "step {j}: pivot missing");
                let mut r: BTreeSet<i32> = clauses[pos].iter().copied().filter(|&l| l != x).collect();
                r.extend(clauses[neg].iter().copied().filter(|&l| l != -x));
                check!(r == c, "step {j}: wrong resolvent");
                let mut seen: BTreeSet<usize> = resolved[pos].union(&resolved[neg]).copied().collect();
                check!(seen.insert(var.index()), "step {j}: variable {} resolved twice on a path", var.index());
                resolved.push(seen);
            }
        }
        clauses.push(c);
    }
    check!(clauses.last().is_some_and(|c| c.is_empty()), "does not end in the empty clause");
    Ok(())
}

/// Walks random total assignments and checks the sink clause is falsified
/// and no variable is read twice.
fn random_walks(p: &BranchingProgram, f: &CnfFormula, walks: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = f.num_vars();
    for _ in 0..walks {
        let bias: f64 = rng.random_range(0.0..0.5);
        let values: Vec<bool> = (0..=nv).map(|_| rng.random_bool(bias)).collect();
        let mut seen = BTreeSet::new();
        let mut id = p.root();
        loop {
            match p.node(id) {
                Node::Query { var, lo, hi } => {
                    check!(seen.insert(var.index()), "variable {} read twice", var.index());
                    id = if values[var.index()] { hi } else { lo };
                }
                Node::Sink { clause } => {
                    let falsified = f.clause(clause).lits().iter().all(|l| values[l.var().index()] != l.is_positive());
                    check!(falsified, "sink {id} clause not falsified");
                    break;
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- corpus

struct Entry {
    name: String,
    program: BranchingProgram,
    formula: CnfFormula,
}

#[derive(Default)]
struct Corpus {
    programs: Vec<Entry>,
    /// (label, length before transfer, length after transfer)
    transfers: Vec<(String, usize, usize)>,
}

fn clique_free_instances(count: usize, n_range: (usize, usize), ks: &[usize], xi: f64) -> Vec<(Graph, usize, u64)> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < count {
        let n = n_range.0 + (seed as usize) % (n_range.1 - n_range.0 + 1);
        let k = ks[(seed as usize / 7) % ks.len()];
        let g = sample_er(&ErParams { n, k, xi, seed }).unwrap();
        if !has_clique_of_size(&g, k) {
            out.push((g, k, seed));
        }
        seed += 1;
    }
    out
}

fn block_instances(count: usize, n_range: (usize, usize), ks: &[usize]) -> Vec<(Graph, Partition, u64)> {
    let mut out = Vec::new();
    let mut seed = 1000u64;
    while out.len() < count {
        let n = n_range.0 + (seed as usize) % (n_range.1 - n_range.0 + 1);
        let k = ks[(seed as usize / 5) % ks.len()];
        let p = 0.25 + 0.35 * ((seed % 5) as f64) / 4.0;
        let g = sample_gnp(n, p, seed).unwrap();
        let part = balanced_partition(n, k).unwrap();
        if !has_transversal_clique(&g, &part) {
            out.push((g, part, seed));
        }
        seed += 1;
    }
    out
}

// ---------------------------------------------------------------- criteria

fn c1_encodings() -> Check {
    let mut checked = 0;
    for n in 0..=5usize {
        let pairs = n * (n.saturating_sub(1)) / 2;
        for mask in 0u32..1 << pairs {
            let g = graph_from_mask(n, mask);
            for k in [2, 3] {
                let has = clique_masks(&g).iter().any(|m| m.count_ones() as usize == k);
                check!(has == has_clique_of_size(&g, k), "n={n} mask={mask} k={k}: clique oracle disagreement");
                let full = brute_sat(&encode_clique(&g, k, true).map_err(e)?);
                let weak = brute_sat(&encode_weak(&g, k).map_err(e)?);
                check!(full == has && weak == has, "n={n} mask={mask} k={k}: map/weak encoding mismatch");
                if n >= k {
                    let part = balanced_partition(n, k).map_err(e)?;
                    let trans = clique_masks(&g).iter().any(|&m| {
                        m.count_ones() as usize == k
                            && (0..k).all(|i| part.block(i).iter().filter(|&&v| m >> v & 1 == 1).count() == 1)
                    });
                    check!(trans == has_transversal_clique(&g, &part), "n={n} mask={mask} k={k}: transversal oracle");
                    let block = brute_sat(&encode_clique_block(&g, &part).map_err(e)?);
                    check!(block == trans, "n={n} mask={mask} k={k}: block encoding mismatch");
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (graph, k) pairs agree"))
}

fn c2_algorithm1(corpus: &mut Corpus) -> Check {
    let inst = clique_free_instances(50, (8, 14), &[3, 4], 1.0);
    let mut worst = 0.0f64;
    for (g, k, seed) in &inst {
        let (n, k) = (g.n(), *k);
        let sp = build_search_program(g, k).map_err(|x| format!("seed {seed}: {x}"))?;
        check_read_once(&sp.program).map_err(|x| format!("seed {seed}: {x}"))?;
        verify_search_program(&sp.program, &sp.formula).map_err(|x| format!("seed {seed}: {x}"))?;
        random_walks(&sp.program, &sp.formula, 300, *seed).map_err(|x| format!("seed {seed}: {x}"))?;
        let idx = index_size(g);
        let lib = clique_index(g, DEFAULT_BUDGET).map_err(e)?.len();
        check!(idx == lib, "seed {seed}: index size {lib}, oracle {idx}");
        let bound = idx * k * k * n * n;
        check!(sp.program.len() <= bound, "seed {seed}: {} nodes > bound {bound}", sp.program.len());
        worst = worst.max(sp.program.len() as f64 / bound as f64);
        corpus.programs.push(Entry { name: format!("alg1 seed {seed}"), program: sp.program, formula: sp.formula });
    }
    Ok(format!("{} instances, max size/bound {:.4}", inst.len(), worst))
}

fn planted(n: usize, colours: usize, p: f64, seed: u64) -> (Graph, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..colours)).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if labels[u] != labels[v] && rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    (Graph::from_edges(n, edges).unwrap(), labels)
}

fn c3_colourable(corpus: &mut Corpus) -> Check {
    let mut count = 0;
    let mut worst = 0.0f64;
    for seed in 0..24u64 {
        let colours = 2 + (seed % 2) as usize;
        let n = 6 + (seed as usize * 7) % 15;
        let (g, labels) = planted(n, colours, 0.6, seed);
        for k in colours + 1..=5 {
            let r = refute_colourable(&g, &labels, k).map_err(|x| format!("seed {seed} k={k}: {x}"))?;
            let weak = encode_weak(&g, k).map_err(e)?;
            verify_refutation(&r.proof, &weak, true).map_err(|x| format!("seed {seed} k={k}: {x}"))?;
            independent_check(&r.proof, &weak).map_err(|x| format!("seed {seed} k={k}: {x}"))?;
            let bound = (1usize << k) * k * k * n * n;
            check!(r.proof.len() <= bound, "seed {seed} k={k}: proof {} > {bound}", r.proof.len());
            check!(r.program_nodes <= bound, "seed {seed} k={k}: program {} > {bound}", r.program_nodes);
            worst = worst.max(r.program_nodes as f64 / bound as f64);

            let sup = Graph::complete_multipartite(&labels);
            let sp = build_search_program(&sup, k).map_err(e)?;
            let pi = robp_to_refutation(&sp.program, &sp.formula).map_err(e)?;
            corpus.transfers.push((format!("colour seed {seed} k={k}"), pi.len(), r.proof.len()));
            if k == colours + 1 {
                corpus.programs.push(Entry { name: format!("colour seed {seed}"), program: sp.program, formula: sp.formula });
            }
            count += 1;
        }
    }
    Ok(format!("{count} refutations, max size/bound {worst:.4}"))
}

fn c4_homomorphic(corpus: &mut Corpus) -> Check {
    let c5 = Graph::cycle(5);
    let mut count = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 5 + (seed as usize) % 11;
        let map: Vec<usize> = (0..n).map(|_| rng.random_range(0..5)).collect();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if c5.has_edge(map[u], map[v]) && rng.random_bool(0.7) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(n, edges).map_err(e)?;
        let hom = Homomorphism::new(&g, &c5, map.clone()).map_err(e)?;
        let r = refute_homomorphic(&g, &c5, &hom, 3).map_err(|x| format!("seed {seed}: {x}"))?;
        let weak = encode_weak(&g, 3).map_err(e)?;
        verify_refutation(&r.proof, &weak, true).map_err(|x| format!("seed {seed}: {x}"))?;
        independent_check(&r.proof, &weak).map_err(|x| format!("seed {seed}: {x}"))?;
        let bound = 125 * 9 * n * n;
        check!(r.proof.len() <= bound && r.program_nodes <= bound, "seed {seed}: size above {bound}");

        let mut sizes = vec![0usize; 5];
        for &u in &map {
            sizes[u] += 1;
        }
        let (blown, _) = blow_up(&c5, &sizes).map_err(e)?;
        let sp = build_search_program(&blown, 3).map_err(e)?;
        let pi = robp_to_refutation(&sp.program, &sp.formula).map_err(e)?;
        corpus.transfers.push((format!("hom seed {seed}"), pi.len(), r.proof.len()));
        count += 1;
    }
    let mut index_checks = 0;
    for seed in 0..60u64 {
        let m = 1 + (seed as usize) % 6;
        let h = sample_gnp(m, 0.5, seed).map_err(e)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 99);
        let sizes: Vec<usize> = (0..m).map(|_| rng.random_range(1..4)).collect();
        let (blown, _) = blow_up(&h, &sizes).map_err(e)?;
        let (a, b) = (index_size(&h), index_size(&blown));
        check!(a == b, "seed {seed}: |I(H)| = {a} but |I(blow-up)| = {b}");
        check!(clique_index(&blown, DEFAULT_BUDGET).map_err(e)?.len() == b, "seed {seed}: library index disagrees");
        index_checks += 1;
    }
    Ok(format!("{count} refutations within 5^3 k^2 n^2; {index_checks} index-size checks"))
}

fn c5_conversion(corpus: &Corpus) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut restrictions = 0;
    for entry in &corpus.programs {
        let name = &entry.name;
        let (p, f) = (&entry.program, &entry.formula);
        check_read_once(p).map_err(|x| format!("{name}: {x}"))?;
        verify_search_program(p, f).map_err(|x| format!("{name}: {x}"))?;
        let pi = robp_to_refutation(p, f).map_err(|x| format!("{name}: {x}"))?;
        verify_refutation(&pi, f, true).map_err(|x| format!("{name}: {x}"))?;
        independent_check(&pi, f).map_err(|x| format!("{name}: {x}"))?;
        check!(pi.len() <= p.len(), "{name}: proof {} longer than program {}", pi.len(), p.len());
        for _ in 0..3 {
            let mut rho = Assignment::new(f.num_vars());
            let density: f64 = rng.random_range(0.05..0.5);
            for x in 1..=f.num_vars() {
                if rng.random_bool(density) {
                    rho.set(Var::new(x as u32), rng.random_bool(0.3)).map_err(e)?;
                }
            }
            let rp = restrict_proof(&pi, &rho).map_err(|x| format!("{name}: {x}"))?;
            check!(rp.len() <= pi.len(), "{name}: restriction grew the proof");
            verify_refutation(&rp, &restrict(f, &rho), true).map_err(|x| format!("{name} restricted: {x}"))?;
            restrictions += 1;
        }
    }
    for (label, before, after) in &corpus.transfers {
        check!(after <= before, "{label}: transfer grew the proof from {before} to {after}");
    }
    Ok(format!(
        "{} programs converted, {restrictions} restrictions, {} transfers",
        corpus.programs.len(),
        corpus.transfers.len()
    ))
}

fn block_programs() -> Vec<(String, Graph, Partition, BranchingProgram, CnfFormula)> {
    let mut out = Vec::new();
    for (g, part, seed) in block_instances(3, (7, 10), &[3, 4]) {
        let dt = build_decision_tree_program(&g, &part).unwrap();
        out.push((format!("tree seed {seed}"), g.clone(), part.clone(), dt.program, dt.formula));
        let ex = extract_robp_cliquer(&g, &part).unwrap();
        out.push((format!("cliquer seed {seed}"), g.clone(), part.clone(), ex.program, ex.formula));
        let ex = extract_robp_maxclique(&g, &part).unwrap();
        out.push((format!("bb seed {seed}"), g, part, ex.program, ex.formula));
    }
    out
}

fn c6_distribution() -> Check {
    let programs = block_programs();
    let distinct: BTreeSet<Vec<Node>> = programs.iter().map(|p| p.3.nodes().to_vec()).collect();
    check!(distinct.len() >= 3, "only {} distinct programs", distinct.len());
    let mut total = 0;
    for (name, g, part, p, f) in &programs {
        let sides = side_sets(p, part).map_err(e)?;
        for (s, eps) in [(2.0, 0.2), ((g.n() as f64).sqrt(), 0.2)] {
            let cfg = PathSampleConfig::new(s, eps, 17).map_err(e)?;
            for j in 0..10_000u64 {
                let sp = sample_path(p, g, part, &sides, &cfg, &mut cfg.rng(j)).map_err(e)?;
                let path = &sp.path;
                check!(matches!(f.kind(sp.sink_clause), AxiomKind::Clique(_)), "{name} sample {j}: sink is not a clique axiom");
                check!(path.ones() <= part.k(), "{name} sample {j}: {} ones", path.ones());
                let forced_one = path.forced.iter().zip(&path.answers).any(|(&f, &a)| f && a);
                check!(!forced_one, "{name} sample {j}: forced answer took the 1-edge");
                // The path is the one the sampled answers induce.
                let alpha = path.assignment(p, f.num_vars()).map_err(e)?;
                check!(path_of(p, &alpha).map_err(e)?.nodes == path.nodes, "{name} sample {j}: path mismatch");
                total += 1;
            }
        }
    }
    Ok(format!("{} programs ({} distinct), {total} paths", programs.len(), distinct.len()))
}

fn c7_lemma() -> Check {
    // Complete multipartite graphs with one colour class fewer than the number
    // of blocks, and partitions in which every block meets several classes.
    let setups: Vec<(Vec<usize>, Vec<Vec<usize>>)> = vec![
        ((0..9).map(|v| v % 3).collect(), vec![vec![0, 1, 2], vec![3, 4], vec![5, 6], vec![7, 8]]),
        ((0..10).map(|v| v % 2).collect(), vec![vec![0, 1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]),
        ((0..8).map(|v| v % 2).collect(), vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7]]),
    ];
    let (t, r, q) = (2.0, 0.5, 0.5);
    let mut lines = Vec::new();
    for (si, (labels, blocks)) in setups.into_iter().enumerate() {
        let g = Graph::complete_multipartite(&labels);
        let part = Partition::new(g.n(), blocks).map_err(e)?;
        for i in 0..part.k() {
            let v = is_r_q_dense(&g, part.block_set(i), t * r, t * q, DEFAULT_BUDGET).map_err(e)?;
            check!(v.holds, "setup {si}: block {i} not (tr, tq)-dense");
        }
        let s = (g.n() as f64).sqrt();
        let cfg = PathSampleConfig::new(s, 0.2, 7).map_err(e)?;
        let at = |x: resclique_core::Error| format!("setup {si}: {x}");
        let dt = build_decision_tree_program(&g, &part).map_err(at)?;
        let ex_c = extract_robp_cliquer(&g, &part).map_err(at)?;
        let ex_b = extract_robp_maxclique(&g, &part).map_err(at)?;
        for (name, p, f) in [("tree", &dt.program, &dt.formula), ("cliquer", &ex_c.program, &ex_c.formula), ("bb", &ex_b.program, &ex_b.formula)] {
            let rep = check_lemma_legitimate(p, f, &g, &part, t, r, q, 1000, &cfg, DEFAULT_BUDGET).map_err(e)?;
            check!(rep.malformed == 0 && rep.forced_ones == 0, "setup {si} {name}: malformed paths");
            check!(rep.found == rep.samples, "setup {si} {name}: only {} of {} paths", rep.found, rep.samples);
            lines.push(format!("{si}/{name}"));
        }
    }
    Ok(format!("1000/1000 paths on {} programs", lines.len()))
}

fn c8_denseness() -> Check {
    let mut greedy_runs = 0;
    let mut excluded = 0;
    for seed in 0..40u64 {
        let n = 6 + (seed as usize) % 5;
        let g = sample_gnp(n, 0.3 + 0.1 * (seed % 5) as f64, seed).map_err(e)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let w = VertexSet::from_iter(n, (0..n).filter(|_| rng.random_bool(0.7)));
            for (r_prime, r, q_prime) in [(2.0, 1.0, 1.5), (2.0, 2.0, 1.0), (3.0, 1.0, 2.0), (2.0, 1.0, 3.0)] {
                // The guarantee needs every R with |R| < r to be q'-dense in W.
                let below = if r >= 1.0 { r - 1.0 } else { 0.0 };
                if !is_r_q_dense(&g, &w, below, q_prime, DEFAULT_BUDGET).map_err(e)?.holds {
                    excluded += 1;
                    continue;
                }
                let s = greedy_witness(&g, &w, r_prime, r, q_prime, DEFAULT_BUDGET).map_err(e)?;
                let v = check_mostly_dense(&g, &w, &s, r_prime, r, q_prime, DEFAULT_BUDGET).map_err(e)?;
                check!(v.holds, "seed {seed}: greedy witness rejected, counterexample {:?}", v.counterexample);
                greedy_runs += 1;
            }
        }
    }

    // Complete 3-partite graph, four blocks.
    let labels: Vec<usize> = (0..12).map(|v| v % 3).collect();
    let g = Graph::complete_multipartite(&labels);
    let part = balanced_partition(12, 4).map_err(e)?;
    let params = DensenessParams::custom(4, 2.0, 1.0, 0.5, 3.0, 0.2).map_err(e)?;
    let rep = is_clique_dense(&g, &part, &params, &WMode::Exhaustive, DEFAULT_BUDGET).map_err(e)?;
    check!(rep.property1, "property 1 should hold");
    check!(!rep.property2, "property 2 should fail");
    // Oracle: W = two colour classes; every (class 0, class 1) pair is sparse,
    // so S must cover K_{4,4} and needs 4 > 3 vertices.
    let w = VertexSet::from_iter(12, (0..12).filter(|v| v % 3 != 2));
    check!(rep.failures.iter().any(|f| f.w == w), "two-class W not among failures");
    let mut any = false;
    let items: Vec<usize> = (0..12).collect();
    resclique_core::denseness::for_each_subset_upto(&items, 3, DEFAULT_BUDGET, |s| {
        let s = VertexSet::from_iter(12, s.iter().copied());
        let covers = (0..12).all(|u| (0..12).all(|v| !(u % 3 == 0 && v % 3 == 1) || s.contains(u) || s.contains(v)));
        any |= covers;
        std::ops::ControlFlow::Continue(())
    })
    .map_err(e)?;
    check!(!any, "oracle found a small cover");
    Ok(format!(
        "{greedy_runs} greedy witnesses verified ({excluded} W outside the guarantee); remark: {} dense W, {} without witness",
        rep.w_dense,
        rep.failures.len()
    ))
}

fn c9_solvers() -> Check {
    for seed in 0..200u64 {
        let n = 10 + (seed as usize) % 31;
        let p = 0.1 + 0.5 * ((seed % 7) as f64) / 6.0;
        let g = sample_gnp(n, p, seed).map_err(e)?;
        let omega = bk_max(&g);
        let brute = resclique_core::graph::max_clique_brute(&g).map_err(e)?.len();
        check!(omega == brute, "seed {seed}: oracles disagree");
        for (name, sol) in [("cliquer", cliquer(&g)), ("bb", max_clique_bb(&g))] {
            check!(sol.clique.len() == omega, "seed {seed} {name}: size {} vs {omega}", sol.clique.len());
            check!(g.is_clique(&sol.clique), "seed {seed} {name}: not a clique");
        }
        if n <= 20 {
            let sol = cliquer(&g);
            for i in 0..n {
                let suffix = VertexSet::from_iter(n, sol.trace.order[i..].iter().copied());
                let (sub, _) = g.induced(&suffix);
                check!(sol.trace.bounds[i] == bk_max(&sub), "seed {seed}: bounds[{i}] wrong");
            }
        }
    }
    Ok("200 instances match, suffix bounds exact".into())
}

fn c10_extraction(corpus: &mut Corpus) -> Check {
    let inst = block_instances(30, (6, 12), &[2, 3, 4]);
    let mut worst = 0.0f64;
    for (g, part, seed) in &inst {
        let (n, k) = (g.n(), part.k());
        for (name, ex) in [("cliquer", extract_robp_cliquer(g, part)), ("bb", extract_robp_maxclique(g, part))] {
            let ex = ex.map_err(|x| format!("seed {seed} {name}: {x}"))?;
            check_read_once(&ex.program).map_err(|x| format!("seed {seed} {name}: {x}"))?;
            verify_search_program(&ex.program, &ex.formula).map_err(|x| format!("seed {seed} {name}: {x}"))?;
            random_walks(&ex.program, &ex.formula, 300, *seed).map_err(|x| format!("seed {seed} {name}: {x}"))?;
            let scale = ((1usize << k) * k * k * n * n) as f64;
            let need = ex.program.len() as f64 / scale;
            let tree = ex.stats.tree_nodes() as f64;
            check!(tree >= need, "seed {seed} {name}: tree {tree} < {need}");
            for sp in &ex.splices {
                check!((sp.nodes as f64) <= sp.bound(), "seed {seed} {name}: splice {} > {}", sp.nodes, sp.bound());
            }
            worst = worst.max(need / tree.max(1.0));
            corpus.programs.push(Entry { name: format!("{name} seed {seed}"), program: ex.program, formula: ex.formula });
        }
    }
    Ok(format!("{} instances x 2 extractions verified, max needed/tree {worst:.5}", inst.len()))
}

fn c11_scaling() -> Check {
    let cfg = ExperimentConfig {
        ns: vec![20, 30, 40, 50],
        ks: vec![3, 4],
        xi: 1.5,
        seeds: 30,
        first_seed: 0,
        algos: vec![AlgoName::Cliquer, AlgoName::Bb],
        extract: true,
    };
    let res = run_experiment(&cfg).map_err(e)?;
    check!(res.failures.is_empty(), "instance failures: {:?}", res.failures);
    check!(res.rows.iter().all(|r| r.verified), "unverified rows");
    for r in &res.rows {
        let need = r.robp_nodes.unwrap_or(0) as f64 / ((1u64 << r.k) as f64 * (r.k * r.k * r.n * r.n) as f64);
        check!(r.treenodes as f64 >= need, "seed {} {}: tree nodes below overhead bound", r.seed, r.algo);
    }
    let sum = summarize(&res.rows);
    let med = |a: AlgoName, k: usize, n: usize| sum.get(&(a, k, n)).and_then(|s| s.robp_nodes).unwrap_or(f64::NAN);
    let mut table = Vec::new();
    let mut problems = Vec::new();
    for a in [AlgoName::Cliquer, AlgoName::Bb] {
        for k in [3, 4] {
            let row: Vec<f64> = cfg.ns.iter().map(|&n| med(a, k, n)).collect();
            table.push(format!("{a} k={k} {row:?}"));
            if row.windows(2).any(|w| !(w[1] >= w[0])) {
                problems.push(format!("{a} k={k} not non-decreasing in n"));
            }
        }
        for &n in &cfg.ns {
            if !(med(a, 4, n) > med(a, 3, n)) {
                problems.push(format!("{a} n={n}: k=4 median {} <= k=3 median {}", med(a, 4, n), med(a, 3, n)));
            }
        }
    }
    let detail = format!("medians {}; rejected {}", table.join("; "), res.rejected);
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", problems.join("; ")))
    }
}

fn main() {
    let mut corpus = Corpus::default();
    let mut results: Vec<(usize, &str, Check, f64)> = Vec::new();
    let mut run = |id: usize, name: &'static str, f: &mut dyn FnMut() -> Check| {
        let start = Instant::now();
        let res = f();
        results.push((id, name, res, start.elapsed().as_secs_f64()));
    };
    run(1, "encoding soundness", &mut c1_encodings);
    run(2, "algorithm 1 size bound", &mut || c2_algorithm1(&mut corpus));
    run(3, "colourable refutations", &mut || c3_colourable(&mut corpus));
    run(4, "homomorphic refutations", &mut || c4_homomorphic(&mut corpus));
    // Extraction runs before the conversion check so its programs join the corpus.
    run(10, "trace extraction", &mut || c10_extraction(&mut corpus));
    run(5, "program to refutation", &mut || c5_conversion(&corpus));
    run(6, "random path distribution", &mut c6_distribution);
    run(7, "useful pair sanity", &mut c7_lemma);
    run(8, "denseness checkers", &mut c8_denseness);
    run(9, "solvers", &mut c9_solvers);
    run(11, "scaling shadow", &mut c11_scaling);

    results.sort_by_key(|r| r.0);
    let mut unexpected = Vec::new();
    for (id, name, res, secs) in &results {
        match res {
            Ok(d) => println!("criterion {id:>2} {name}: PASS ({secs:.1}s) {d}"),
            Err(d) => {
                let known = KNOWN_RED.contains(id);
                println!("criterion {id:>2} {name}: FAIL{} ({secs:.1}s) {d}", if known { " [known]" } else { "" });
                if !known {
                    unexpected.push(*id);
                }
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
