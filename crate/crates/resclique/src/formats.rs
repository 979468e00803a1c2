//! Text formats for graphs, formulas, refutations and branching programs.
//!
//! Graph: DIMACS `p edge n m` with `e u v` lines, vertices 1-based.
//!
//! CNF: DIMACS `p cnf V C`. Formulas produced by the clique encoders carry a
//! `c resclique encoding=<map|weak|block> n=<n> k=<k>` comment, and block
//! formulas list their blocks as `c block <i> <v>...` (1-based). With that
//! header the reader recovers the variable map, the partition and the axiom
//! kind of every clause.
//!
//! Proof: one step per line, `A <lits> 0` for an axiom and
//! `R <pos> <neg> <var> <lits> 0` for a resolvent, step numbers 1-based.
//!
//! Branching program: `N <id> <var> <id0> <id1>` for a query and
//! `S <id> <clause>` for a sink, ids and clause numbers 1-based. The first
//! line is the root.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, ensure, Context, Result};
use resclique_core::cnf::{AxiomKind, Clause, CnfFormula, Var, VarMap};
use resclique_core::graph::{Graph, Partition};
use resclique_core::proof::{ResolutionProof, Rule, Step};
use resclique_core::robp::{BranchingProgram, Node};

/// Which clique encoding a CNF file holds.
#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum Encoding {
    Map,
    Weak,
    Block,
}

impl Encoding {
    fn name(self) -> &'static str {
        match self {
            Encoding::Map => "map",
            Encoding::Weak => "weak",
            Encoding::Block => "block",
        }
    }
}

/// A formula together with what its header says about it.
#[derive(Clone, Debug)]
pub struct CnfFile {
    pub formula: CnfFormula,
    pub encoding: Option<Encoding>,
    pub n: usize,
    pub k: usize,
    pub partition: Option<Partition>,
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c') && !l.starts_with('%'))
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, what: &str, line: usize) -> Result<T> {
    let tok = tok.ok_or_else(|| anyhow!("line {line}: missing {what}"))?;
    tok.parse().map_err(|_| anyhow!("line {line}: bad {what} `{tok}`"))
}

pub fn write_graph(g: &Graph) -> String {
    let mut s = format!("p edge {} {}\n", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(s, "e {} {}", u + 1, v + 1);
    }
    s
}

pub fn read_graph(text: &str) -> Result<Graph> {
    let mut n = None;
    let mut edges = Vec::new();
    for (ln, line) in data_lines(text) {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("p") => {
                ensure!(n.is_none(), "line {ln}: second problem line");
                let kind = toks.next();
                ensure!(matches!(kind, Some("edge") | Some("col")), "line {ln}: expected `p edge`");
                n = Some(parse::<usize>(toks.next(), "vertex count", ln)?);
            }
            Some("e") => {
                let n = n.ok_or_else(|| anyhow!("line {ln}: edge before problem line"))?;
                let u: usize = parse(toks.next(), "vertex", ln)?;
                let v: usize = parse(toks.next(), "vertex", ln)?;
                ensure!((1..=n).contains(&u) && (1..=n).contains(&v), "line {ln}: vertex out of range");
                edges.push((u - 1, v - 1));
            }
            _ => bail!("line {ln}: unexpected `{line}`"),
        }
    }
    let n = n.ok_or_else(|| anyhow!("missing `p edge` line"))?;
    Ok(Graph::from_edges(n, edges)?)
}

fn write_lits(s: &mut String, c: &Clause) {
    for l in c.lits() {
        let _ = write!(s, "{} ", l.to_dimacs());
    }
    s.push('0');
}

pub fn write_cnf(f: &CnfFormula, encoding: Option<Encoding>, partition: Option<&Partition>) -> String {
    let mut s = String::new();
    match (f.var_map(), encoding) {
        (VarMap::Map { n, k }, Some(e)) => {
            let _ = writeln!(s, "c resclique encoding={} n={n} k={k}", e.name());
        }
        (VarMap::Block { n }, _) => {
            let k = partition.map_or(0, Partition::k);
            let _ = writeln!(s, "c resclique encoding=block n={n} k={k}");
            if let Some(part) = partition {
                for i in 0..part.k() {
                    let _ = write!(s, "c block {}", i + 1);
                    for &v in part.block(i) {
                        let _ = write!(s, " {}", v + 1);
                    }
                    s.push('\n');
                }
            }
        }
        _ => {}
    }
    let _ = writeln!(s, "p cnf {} {}", f.num_vars(), f.len());
    for c in f.clauses() {
        write_lits(&mut s, c);
        s.push('\n');
    }
    s
}

struct Header {
    encoding: Encoding,
    n: usize,
    k: usize,
    blocks: BTreeMap<usize, Vec<usize>>,
}

fn parse_header(text: &str) -> Result<Option<Header>> {
    let mut header: Option<Header> = None;
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("c resclique ") {
            let mut h = Header { encoding: Encoding::Map, n: 0, k: 0, blocks: BTreeMap::new() };
            for kv in rest.split_whitespace() {
                let (key, val) = kv.split_once('=').ok_or_else(|| anyhow!("line {ln}: bad header field `{kv}`"))?;
                match key {
                    "encoding" => {
                        h.encoding = match val {
                            "map" => Encoding::Map,
                            "weak" => Encoding::Weak,
                            "block" => Encoding::Block,
                            _ => bail!("line {ln}: unknown encoding `{val}`"),
                        }
                    }
                    "n" => h.n = parse(Some(val), "n", ln)?,
                    "k" => h.k = parse(Some(val), "k", ln)?,
                    _ => bail!("line {ln}: unknown header field `{key}`"),
                }
            }
            header = Some(h);
        } else if let Some(rest) = line.strip_prefix("c block ") {
            let h = header.as_mut().ok_or_else(|| anyhow!("line {ln}: block before header"))?;
            let mut toks = rest.split_whitespace();
            let i: usize = parse(toks.next(), "block number", ln)?;
            ensure!(i >= 1, "line {ln}: blocks are numbered from 1");
            let vs = toks.map(|t| parse::<usize>(Some(t), "vertex", ln)).collect::<Result<Vec<_>>>()?;
            ensure!(vs.iter().all(|&v| v >= 1), "line {ln}: vertices are numbered from 1");
            h.blocks.insert(i - 1, vs.into_iter().map(|v| v - 1).collect());
        }
    }
    Ok(header)
}

fn kind_of(c: &Clause, var_map: VarMap, part: Option<&Partition>) -> AxiomKind {
    let decode = |x: Var| var_map.decode(x);
    let slot = |x: Var| match decode(x) {
        Some((_, Some(i))) => Some(i),
        Some((v, None)) => part.map(|p| p.block_of(v)),
        None => None,
    };
    let lits = c.lits();
    if var_map == VarMap::Plain || lits.is_empty() {
        return AxiomKind::Other;
    }
    if lits.iter().all(|l| l.is_positive()) {
        let slots: Vec<_> = lits.iter().map(|l| slot(l.var())).collect();
        return match slots[0] {
            Some(i) if slots.iter().all(|&s| s == Some(i)) => AxiomKind::Clique(i),
            _ => AxiomKind::Other,
        };
    }
    if lits.len() == 2 && lits.iter().all(|l| !l.is_positive()) {
        let (a, b) = (lits[0].var(), lits[1].var());
        return match (slot(a), slot(b)) {
            (Some(i), Some(j)) if i == j => AxiomKind::Functionality,
            (Some(_), Some(_)) => AxiomKind::Edge,
            _ => AxiomKind::Other,
        };
    }
    AxiomKind::Other
}

pub fn read_cnf(text: &str) -> Result<CnfFile> {
    let header = parse_header(text)?;
    let mut problem = None;
    let mut clauses = Vec::new();
    let mut pending: Vec<i32> = Vec::new();
    for (ln, line) in data_lines(text) {
        if let Some(rest) = line.strip_prefix("p ") {
            ensure!(problem.is_none(), "line {ln}: second problem line");
            let mut toks = rest.split_whitespace();
            ensure!(toks.next() == Some("cnf"), "line {ln}: expected `p cnf`");
            let v: usize = parse(toks.next(), "variable count", ln)?;
            let c: usize = parse(toks.next(), "clause count", ln)?;
            problem = Some((v, c));
            continue;
        }
        ensure!(problem.is_some(), "line {ln}: clause before problem line");
        for tok in line.split_whitespace() {
            let x: i32 = parse(Some(tok), "literal", ln)?;
            if x == 0 {
                let c = Clause::from_dimacs(&pending).with_context(|| format!("line {ln}"))?;
                clauses.push(c);
                pending.clear();
            } else {
                pending.push(x);
            }
        }
    }
    ensure!(pending.is_empty(), "last clause is not terminated by 0");
    let (num_vars, declared) = problem.ok_or_else(|| anyhow!("missing `p cnf` line"))?;
    ensure!(declared == clauses.len(), "header declares {declared} clauses, found {}", clauses.len());

    let (var_map, encoding, n, k, partition) = match header {
        None => (VarMap::Plain, None, 0, 0, None),
        Some(h) => match h.encoding {
            Encoding::Map | Encoding::Weak => {
                ensure!(num_vars == h.n * h.k, "map encoding with n={} k={} needs {} variables", h.n, h.k, h.n * h.k);
                (VarMap::Map { n: h.n, k: h.k }, Some(h.encoding), h.n, h.k, None)
            }
            Encoding::Block => {
                ensure!(num_vars == h.n, "block encoding with n={} needs {} variables", h.n, h.n);
                ensure!(h.blocks.len() == h.k && h.blocks.keys().copied().eq(0..h.k), "expected blocks 1..={}", h.k);
                let part = Partition::new(h.n, h.blocks.into_values().collect())?;
                (VarMap::Block { n: h.n }, Some(Encoding::Block), h.n, h.k, Some(part))
            }
        },
    };
    let tagged: Vec<_> = clauses
        .into_iter()
        .map(|c| {
            let kind = kind_of(&c, var_map, partition.as_ref());
            (c, kind)
        })
        .collect();
    let formula = CnfFormula::new(num_vars, tagged, var_map)?;
    Ok(CnfFile { formula, encoding, n, k, partition })
}

pub fn write_proof(pi: &ResolutionProof) -> String {
    let mut s = String::new();
    for step in pi.steps() {
        match step.rule {
            Rule::Axiom => s.push_str("A "),
            Rule::Resolve { pos, neg, var } => {
                let _ = write!(s, "R {} {} {} ", pos + 1, neg + 1, var.index());
            }
        }
        write_lits(&mut s, &step.clause);
        s.push('\n');
    }
    s
}

pub fn read_proof(text: &str) -> Result<ResolutionProof> {
    let mut steps = Vec::new();
    for (ln, line) in data_lines(text) {
        let mut toks = line.split_whitespace();
        let rule = match toks.next() {
            Some("A") => Rule::Axiom,
            Some("R") => {
                let pos: usize = parse(toks.next(), "antecedent", ln)?;
                let neg: usize = parse(toks.next(), "antecedent", ln)?;
                let var: u32 = parse(toks.next(), "variable", ln)?;
                ensure!(pos >= 1 && neg >= 1 && var >= 1, "line {ln}: step and variable numbers start at 1");
                Rule::Resolve { pos: pos - 1, neg: neg - 1, var: Var::new(var) }
            }
            _ => bail!("line {ln}: expected `A` or `R`"),
        };
        let mut lits = Vec::new();
        let mut closed = false;
        for tok in toks {
            ensure!(!closed, "line {ln}: data after terminating 0");
            let x: i32 = parse(Some(tok), "literal", ln)?;
            if x == 0 {
                closed = true;
            } else {
                lits.push(x);
            }
        }
        ensure!(closed, "line {ln}: clause is not terminated by 0");
        let clause = Clause::from_dimacs(&lits).with_context(|| format!("line {ln}"))?;
        steps.push(Step { clause, rule });
    }
    Ok(ResolutionProof::from_steps(steps))
}

pub fn write_robp(p: &BranchingProgram) -> String {
    let mut s = String::new();
    for (id, node) in p.nodes().iter().enumerate() {
        match *node {
            Node::Query { var, lo, hi } => {
                let _ = writeln!(s, "N {} {} {} {}", id + 1, var.index(), lo + 1, hi + 1);
            }
            Node::Sink { clause } => {
                let _ = writeln!(s, "S {} {}", id + 1, clause + 1);
            }
        }
    }
    s
}

pub fn read_robp(text: &str) -> Result<BranchingProgram> {
    let mut nodes = BTreeMap::new();
    let mut root = None;
    for (ln, line) in data_lines(text) {
        let mut toks = line.split_whitespace();
        let tag = toks.next();
        let id: usize = parse(toks.next(), "node id", ln)?;
        ensure!(id >= 1, "line {ln}: node ids start at 1");
        let node = match tag {
            Some("N") => {
                let var: u32 = parse(toks.next(), "variable", ln)?;
                let lo: usize = parse(toks.next(), "node id", ln)?;
                let hi: usize = parse(toks.next(), "node id", ln)?;
                ensure!(var >= 1 && lo >= 1 && hi >= 1, "line {ln}: numbers start at 1");
                Node::Query { var: Var::new(var), lo: lo - 1, hi: hi - 1 }
            }
            Some("S") => {
                let clause: usize = parse(toks.next(), "clause number", ln)?;
                ensure!(clause >= 1, "line {ln}: clause numbers start at 1");
                Node::Sink { clause: clause - 1 }
            }
            _ => bail!("line {ln}: expected `N` or `S`"),
        };
        ensure!(toks.next().is_none(), "line {ln}: trailing data");
        ensure!(nodes.insert(id - 1, node).is_none(), "line {ln}: node {id} defined twice");
        root.get_or_insert(id - 1);
    }
    let root = root.ok_or_else(|| anyhow!("empty branching program"))?;
    let size = nodes.keys().next_back().map_or(0, |&m| m + 1);
    ensure!(nodes.len() == size, "node ids must be 1..={}", nodes.len());
    let nodes: Vec<Node> = nodes.into_values().collect();
    Ok(BranchingProgram::new(&nodes, root)?)
}

/// Whitespace-separated 1-based vertex lists, one set per line.
pub fn read_vertex_sets(text: &str, n: usize) -> Result<Vec<Vec<usize>>> {
    data_lines(text)
        .map(|(ln, line)| {
            line.split_whitespace()
                .map(|t| {
                    let v: usize = parse(Some(t), "vertex", ln)?;
                    ensure!((1..=n).contains(&v), "line {ln}: vertex {v} out of range");
                    Ok(v - 1)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use resclique_core::cnf::{encode_clique, encode_clique_block, encode_weak};
    use resclique_core::construct::build_search_program;
    use resclique_core::graph::{balanced_partition, sample_gnp};
    use resclique_core::robp::robp_to_refutation;

    fn same_formula(a: &CnfFormula, b: &CnfFormula) {
        assert_eq!(a.num_vars(), b.num_vars());
        assert_eq!(a.var_map(), b.var_map());
        assert_eq!(a.clauses(), b.clauses());
        for i in 0..a.len() {
            assert_eq!(a.kind(i), b.kind(i), "clause {i}");
        }
    }

    #[test]
    fn graph_round_trip() {
        let g = sample_gnp(9, 0.4, 3).unwrap();
        let h = read_graph(&write_graph(&g)).unwrap();
        assert_eq!(g, h);
        assert!(read_graph("p edge 2 1\ne 1 3\n").is_err());
        assert_eq!(read_graph("c hi\np edge 3 0\n").unwrap().n(), 3);
    }

    #[test]
    fn cnf_round_trip_all_encodings() {
        for seed in 0..5 {
            let g = sample_gnp(7, 0.5, seed).unwrap();
            let f = encode_clique(&g, 3, true).unwrap();
            let back = read_cnf(&write_cnf(&f, Some(Encoding::Map), None)).unwrap();
            same_formula(&f, &back.formula);
            assert_eq!((back.n, back.k, back.encoding), (7, 3, Some(Encoding::Map)));

            let f = encode_weak(&g, 3).unwrap();
            same_formula(&f, &read_cnf(&write_cnf(&f, Some(Encoding::Weak), None)).unwrap().formula);

            let part = balanced_partition(7, 3).unwrap();
            let f = encode_clique_block(&g, &part).unwrap();
            let back = read_cnf(&write_cnf(&f, Some(Encoding::Block), Some(&part))).unwrap();
            same_formula(&f, &back.formula);
            assert_eq!(back.partition.unwrap(), part);
        }
    }

    #[test]
    fn headerless_cnf_is_plain() {
        let f = read_cnf("p cnf 2 2\n1 -2 0\n2 0\n").unwrap();
        assert_eq!(f.formula.var_map(), VarMap::Plain);
        assert_eq!(f.formula.kind(0), AxiomKind::Other);
        assert!(read_cnf("p cnf 2 3\n1 0\n").is_err());
        assert!(read_cnf("p cnf 2 1\n1 3 0\n").is_err());
    }

    #[test]
    fn proof_and_program_round_trip() {
        let g = Graph::cycle(5);
        let sp = build_search_program(&g, 3).unwrap();
        let p = read_robp(&write_robp(&sp.program)).unwrap();
        assert_eq!(p, sp.program);
        let pi = robp_to_refutation(&sp.program, &sp.formula).unwrap();
        assert_eq!(read_proof(&write_proof(&pi)).unwrap(), pi);
    }

    #[test]
    fn malformed_programs() {
        assert!(read_robp("").is_err());
        assert!(read_robp("N 1 1 2 2\n").is_err());
        assert!(read_robp("N 1 1 1 2\nS 2 1\n").is_err());
        assert!(read_robp("S 1 1\nS 3 1\n").is_err());
    }
}
