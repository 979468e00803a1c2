//! Explicit search programs and refutations for clique-free graphs.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::assignment::Assignment;
use crate::cnf::{encode_weak, AxiomKind, Clause, CnfFormula, VarMap};
use crate::error::{Error, Result};
use crate::graph::{common_neighbourhood, for_each_clique, has_clique_of_size, Graph};
use crate::proof::{rename_proof, restrict_proof, verify_refutation, ResolutionProof};
use crate::robp::{robp_to_refutation, BranchingProgram, NodeId, ProgramBuilder};
use crate::set::VertexSet;

/// The distinct common neighbourhoods `N̂(R)` over all cliques `R` of a graph,
/// each with the first clique found that produces it.
#[derive(Clone, Debug)]
pub struct CliqueIndex {
    entries: BTreeMap<VertexSet, Vec<usize>>,
}

impl CliqueIndex {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexSet, &[usize])> {
        self.entries.iter().map(|(k, v)| (k, v.as_slice()))
    }

    /// `G[N̂(R)]` for the entry keyed by `key`.
    pub fn subgraph(&self, g: &Graph, key: &VertexSet) -> Option<(Graph, Vec<usize>)> {
        self.entries.contains_key(key).then(|| g.induced(key))
    }
}

/// Enumerates `I(G)`. Fails once more than `max_cliques` cliques are visited.
pub fn clique_index(g: &Graph, max_cliques: u64) -> Result<CliqueIndex> {
    let mut entries = BTreeMap::new();
    let mut visited = 0u64;
    let all = g.vertex_set();
    for_each_clique(g, usize::MAX, |r| {
        visited += 1;
        if visited > max_cliques {
            return false;
        }
        entries.entry(common_neighbourhood(g, r, &all)).or_insert_with(|| r.to_vec());
        true
    });
    if visited > max_cliques {
        return Err(Error::BudgetExhausted(max_cliques));
    }
    Ok(CliqueIndex { entries })
}

/// A search program together with the formula its sinks refer to.
#[derive(Clone, Debug)]
pub struct SearchProgram {
    pub program: BranchingProgram,
    pub formula: CnfFormula,
}

struct Alg1<'a> {
    g: &'a Graph,
    k: usize,
    f: &'a CnfFormula,
    b: ProgramBuilder,
    memo: BTreeMap<(VertexSet, usize), NodeId>,
}

impl Alg1<'_> {
    fn x(&self, v: usize, i: usize) -> crate::cnf::Var {
        VarMap::map_var(self.g.n(), self.k, v, i)
    }

    fn clique_sink(&mut self, i: usize) -> Result<NodeId> {
        let c = Clause::new((0..self.g.n()).map(|v| self.x(v, i).pos()))?;
        let idx = self.f.expect(&c)?;
        Ok(self.b.sink(idx))
    }

    fn edge_sink(&mut self, a: (usize, usize), b: (usize, usize)) -> Result<NodeId> {
        let c = Clause::new([self.x(a.0, a.1).neg(), self.x(b.0, b.1).neg()])?;
        let idx = self.f.expect(&c)?;
        Ok(self.b.sink(idx))
    }

    /// Program for the state where `x_{w,j} = 0` for all `w ∉ W`, `j <= i`.
    fn state(&mut self, w: &VertexSet, i: usize) -> Result<NodeId> {
        let key = (w.clone(), i);
        if let Some(&id) = self.memo.get(&key) {
            return Ok(id);
        }
        let id = if w.is_empty() {
            self.clique_sink(i)?
        } else {
            if i == 0 {
                return Err(Error::Internal("search reached a k-clique".into()));
            }
            let vs = w.to_vec();
            let mut on_one = Vec::with_capacity(vs.len());
            for &v in &vs {
                // x_{v,i} = 1: every non-neighbour w of v in W (v included) must
                // stay off all earlier positions before descending.
                let next = w.intersection(self.g.neighbours(v));
                let mut cur = self.state(&next, i - 1)?;
                let bad: Vec<usize> = w.difference(self.g.neighbours(v)).to_vec();
                for &u in bad.iter().rev() {
                    for j in (0..i).rev() {
                        let hit = self.edge_sink((v, i), (u, j))?;
                        cur = self.b.query(self.x(u, j), cur, hit);
                    }
                }
                on_one.push(cur);
            }
            let tail = self.clique_sink(i)?;
            let vars: Vec<_> = vs.iter().map(|&v| self.x(v, i)).collect();
            self.b.chain(&vars, &on_one, tail)
        };
        self.memo.insert(key, id);
        Ok(id)
    }
}

/// Search program for the weak encoding of a `k`-clique-free graph. Its size
/// is at most `|I(G)| k² n²`.
pub fn build_search_program(g: &Graph, k: usize) -> Result<SearchProgram> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    if has_clique_of_size(g, k) {
        return Err(Error::HasClique(k));
    }
    let formula = encode_weak(g, k)?;
    let mut alg = Alg1 { g, k, f: &formula, b: ProgramBuilder::new(), memo: BTreeMap::new() };
    let root = alg.state(&g.vertex_set(), k - 1)?;
    let program = alg.b.finish(root)?;
    Ok(SearchProgram { program, formula })
}

/// A vertex map `g -> h` sending edges to edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    map: Vec<usize>,
}

impl Homomorphism {
    pub fn new(g: &Graph, h: &Graph, map: Vec<usize>) -> Result<Self> {
        if map.len() != g.n() {
            return Err(Error::InvalidHomomorphism(format!("map has {} entries for {} vertices", map.len(), g.n())));
        }
        if let Some(v) = map.iter().position(|&u| u >= h.n()) {
            return Err(Error::InvalidHomomorphism(format!("vertex {v} maps outside the target")));
        }
        if let Some((u, v)) = g.edges().find(|&(u, v)| !h.has_edge(map[u], map[v])) {
            return Err(Error::InvalidHomomorphism(format!("edge ({u},{v}) is not preserved")));
        }
        Ok(Homomorphism { map })
    }

    pub fn image(&self, v: usize) -> usize {
        self.map[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }
}

/// Replaces vertex `u` of `h` by an independent cloud of `sizes[u]` vertices.
/// Clouds are numbered consecutively; the returned map collapses each cloud.
pub fn blow_up(h: &Graph, sizes: &[usize]) -> Result<(Graph, Homomorphism)> {
    if sizes.len() != h.n() {
        return Err(Error::InvalidParameter(format!("{} cloud sizes for {} vertices", sizes.len(), h.n())));
    }
    let collapse: Vec<usize> = sizes.iter().enumerate().flat_map(|(u, &s)| core::iter::repeat_n(u, s)).collect();
    let n = collapse.len();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if h.has_edge(collapse[a], collapse[b]) {
                edges.push((a, b));
            }
        }
    }
    let g = Graph::from_edges(n, edges)?;
    let hom = Homomorphism::new(&g, h, collapse)?;
    Ok((g, hom))
}

/// Moves a refutation of `weak(g_super, k)` to `weak(g_sub, k)`, where
/// `embedding[v]` is the image of `v` and edges of `g_sub` map to edges.
pub fn transfer_refutation(
    pi: &ResolutionProof,
    g_super: &Graph,
    g_sub: &Graph,
    embedding: &[usize],
    k: usize,
) -> Result<ResolutionProof> {
    let (ns, nb) = (g_super.n(), g_sub.n());
    if embedding.len() != nb {
        return Err(Error::InvalidEmbedding(format!("{} images for {nb} vertices", embedding.len())));
    }
    let mut preimage = vec![usize::MAX; ns];
    for (v, &u) in embedding.iter().enumerate() {
        if u >= ns || preimage[u] != usize::MAX {
            return Err(Error::InvalidEmbedding(format!("image of {v} out of range or repeated")));
        }
        preimage[u] = v;
    }
    if let Some((a, b)) = g_sub.edges().find(|&(a, b)| !g_super.has_edge(embedding[a], embedding[b])) {
        return Err(Error::InvalidEmbedding(format!("edge ({a},{b}) is not preserved")));
    }
    let mut rho = Assignment::new(ns * k);
    for u in (0..ns).filter(|&u| preimage[u] == usize::MAX) {
        for i in 0..k {
            rho.set(VarMap::map_var(ns, k, u, i), false)?;
        }
    }
    let restricted = restrict_proof(pi, &rho)?;
    let map = VarMap::Map { n: ns, k };
    let renamed = rename_proof(&restricted, |x| {
        let (u, i) = map.decode(x).expect("variable of the super formula");
        VarMap::map_var(nb, k, preimage[u], i.expect("map variable"))
    })?;
    verify_refutation(&renamed, &encode_weak(g_sub, k)?, true)?;
    Ok(renamed)
}

/// A regular refutation of the weak encoding and the size of the program it came from.
#[derive(Clone, Debug)]
pub struct Refutation {
    pub proof: ResolutionProof,
    pub program_nodes: usize,
}

/// Refutes `weak(g, k)` for a graph with a proper colouring using fewer than `k` colours.
pub fn refute_colourable(g: &Graph, colouring: &[usize], k: usize) -> Result<Refutation> {
    if k < 2 {
        return Err(Error::InvalidParameter("k must be at least 2".into()));
    }
    if colouring.len() != g.n() || g.edges().any(|(u, v)| colouring[u] == colouring[v]) {
        return Err(Error::InvalidParameter("colouring is not proper".into()));
    }
    if let Some(v) = colouring.iter().position(|&c| c >= k - 1) {
        return Err(Error::InvalidParameter(format!("vertex {v} uses colour {} >= k-1", colouring[v])));
    }
    let sup = Graph::complete_multipartite(colouring);
    let sp = build_search_program(&sup, k)?;
    let pi = robp_to_refutation(&sp.program, &sp.formula)?;
    let identity: Vec<usize> = (0..g.n()).collect();
    let proof = transfer_refutation(&pi, &sup, g, &identity, k)?;
    Ok(Refutation { proof, program_nodes: sp.program.len() })
}

/// Refutes `weak(g, k)` given a homomorphism into a `k`-clique-free graph `h`.
pub fn refute_homomorphic(g: &Graph, h: &Graph, hom: &Homomorphism, k: usize) -> Result<Refutation> {
    let hom = Homomorphism::new(g, h, hom.as_slice().to_vec())?;
    if has_clique_of_size(h, k) {
        return Err(Error::HasClique(k));
    }
    let mut sizes = vec![0usize; h.n()];
    for v in 0..g.n() {
        sizes[hom.image(v)] += 1;
    }
    let (blown, _) = blow_up(h, &sizes)?;
    let mut start = vec![0usize; h.n()];
    for u in 1..h.n() {
        start[u] = start[u - 1] + sizes[u - 1];
    }
    let embedding: Vec<usize> = (0..g.n())
        .map(|v| {
            let u = hom.image(v);
            start[u] += 1;
            start[u] - 1
        })
        .collect();
    let sp = build_search_program(&blown, k)?;
    let pi = robp_to_refutation(&sp.program, &sp.formula)?;
    let proof = transfer_refutation(&pi, &blown, g, &embedding, k)?;
    Ok(Refutation { proof, program_nodes: sp.program.len() })
}

/// Tag of every sink clause, handy for checks on sink labels.
pub fn sink_kinds(p: &BranchingProgram, f: &CnfFormula) -> Vec<AxiomKind> {
    p.nodes()
        .iter()
        .filter_map(|n| match n {
            crate::robp::Node::Sink { clause } => Some(f.kind(*clause)),
            _ => None,
        })
        .collect()
}
