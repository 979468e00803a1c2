//! Random root-to-sink paths through programs for the block encoding.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, RngCore};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cnf::{encode_clique_block, AxiomKind, Clause, CnfFormula, VarMap};
use crate::construct::SearchProgram;
use crate::denseness::is_r_q_dense;
use crate::error::{Error, Result};
use crate::graph::{has_transversal_clique, Graph, Partition};
use crate::robp::{betas, queried_before, walk, BranchingProgram, Node, NodeId, PathState, ProgramBuilder};
use crate::set::VertexSet;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathSampleConfig {
    bias: f64,
    pub seed: u64,
}

impl PathSampleConfig {
    /// Coin bias `s^(-(1+ε))`.
    pub fn new(s: f64, epsilon: f64, seed: u64) -> Result<Self> {
        if !(s > 1.0 && s.is_finite()) || !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!("need s > 1 and 0 < epsilon < 1, got s={s}, epsilon={epsilon}")));
        }
        Ok(PathSampleConfig { bias: libm::pow(s, -(1.0 + epsilon)), seed })
    }

    /// A fixed bias in `[0, 1]`; 0 gives the deterministic all-zero walk.
    pub fn with_bias(bias: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&bias) {
            return Err(Error::InvalidParameter(format!("bias {bias} outside [0, 1]")));
        }
        Ok(PathSampleConfig { bias, seed })
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// Generator for sample number `index`; samples are independent of each other.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// Per node: vertices set to 0 and to 1 by `β(a)`, and vertices forgotten at `a`.
#[derive(Clone, Debug)]
pub struct NodeSideSets {
    zeros: Vec<VertexSet>,
    ones: Vec<VertexSet>,
    forgotten: Vec<VertexSet>,
    blocks: Vec<VertexSet>,
}

impl NodeSideSets {
    pub fn zeros(&self, a: NodeId) -> &VertexSet {
        &self.zeros[a]
    }

    pub fn ones(&self, a: NodeId) -> &VertexSet {
        &self.ones[a]
    }

    pub fn forgotten_vertices(&self, a: NodeId) -> &VertexSet {
        &self.forgotten[a]
    }

    /// `V_i^0(a)`.
    pub fn zeros_in(&self, a: NodeId, i: usize) -> VertexSet {
        self.zeros[a].intersection(&self.blocks[i])
    }

    /// `V_i^1(a)`.
    pub fn ones_in(&self, a: NodeId, i: usize) -> VertexSet {
        self.ones[a].intersection(&self.blocks[i])
    }

    pub fn is_forgotten(&self, a: NodeId, i: usize) -> bool {
        !self.forgotten[a].is_disjoint(&self.blocks[i])
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

fn vertex_of(var_index: usize) -> usize {
    var_index - 1
}

/// Splits `β(a)` by block and polarity for every node of a block-encoding program.
pub fn side_sets(p: &BranchingProgram, part: &Partition) -> Result<NodeSideSets> {
    let n = part.n();
    if p.max_var() > n {
        return Err(Error::InvalidProgram(format!("variable {} beyond the {n} block variables", p.max_var())));
    }
    let beta = betas(p, n)?;
    let queried = queried_before(p, n);
    let to_vertices = |vars: &VertexSet| VertexSet::from_iter(n, vars.iter().filter(|&x| x > 0).map(vertex_of));
    let mut out = NodeSideSets {
        zeros: Vec::with_capacity(p.len()),
        ones: Vec::with_capacity(p.len()),
        forgotten: Vec::with_capacity(p.len()),
        blocks: (0..part.k()).map(|i| part.block_set(i).clone()).collect(),
    };
    for a in 0..p.len() {
        let zeros = to_vertices(beta[a].zeros());
        let ones = to_vertices(beta[a].ones());
        let mut forgotten = to_vertices(&queried[a]);
        forgotten.difference_with(&zeros);
        forgotten.difference_with(&ones);
        out.zeros.push(zeros);
        out.ones.push(ones);
        out.forgotten.push(forgotten);
    }
    Ok(out)
}

/// A path drawn from the distribution and the clause at its sink.
#[derive(Clone, Debug)]
pub struct SampledPath {
    pub path: PathState,
    pub sink_clause: usize,
}

/// Walks from the root: forced 0 if the vertex's block is forgotten, forced 0
/// if a 1 would falsify an edge or functionality axiom under `β(a)`, otherwise
/// a biased coin decides.
pub fn sample_path<R: RngCore>(
    p: &BranchingProgram,
    g: &Graph,
    part: &Partition,
    sides: &NodeSideSets,
    cfg: &PathSampleConfig,
    rng: &mut R,
) -> Result<SampledPath> {
    let path = walk(p, |a, var| {
        let u = vertex_of(var.index());
        let i = part.block_of(u);
        if sides.is_forgotten(a, i) {
            return (false, true);
        }
        let clash = sides.ones(a).iter().any(|w| w != u && (!g.has_edge(u, w) || part.block_of(w) == i));
        if clash {
            return (false, true);
        }
        (rng.random_bool(cfg.bias), false)
    });
    match p.node(path.sink()) {
        Node::Sink { clause } => Ok(SampledPath { path, sink_clause: clause }),
        Node::Query { .. } => Err(Error::Internal("walk stopped at a query".into())),
    }
}

/// `i(a, b)`: the least block `i` with `V_i^1(b) = ∅`, `i` not forgotten at `b`
/// and `V_i^0(b) \ V_i^0(a)` `(r, q)`-neighbour-dense.
pub fn is_useful_pair(
    g: &Graph,
    sides: &NodeSideSets,
    a: NodeId,
    b: NodeId,
    r: f64,
    q: f64,
    budget: u64,
) -> Result<Option<usize>> {
    for i in 0..sides.k() {
        if !sides.ones_in(b, i).is_empty() || sides.is_forgotten(b, i) {
            continue;
        }
        let diff = sides.zeros_in(b, i).difference(&sides.zeros_in(a, i));
        if is_r_q_dense(g, &diff, r, q, budget)?.holds {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

fn position(path: &PathState, a: NodeId) -> Result<usize> {
    path.nodes
        .iter()
        .position(|&x| x == a)
        .ok_or_else(|| Error::InvalidParameter(format!("node {a} is not on the path")))
}

/// At most `⌈k/t⌉` 1-answers from `a` (inclusive) to `b` (exclusive)?
pub fn frugal_traversal(path: &PathState, a: NodeId, b: NodeId, k: usize, t: f64) -> Result<bool> {
    let (pa, pb) = (position(path, a)?, position(path, b)?);
    if pa > pb {
        return Err(Error::InvalidParameter(format!("node {a} comes after node {b}")));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParameter("t must be positive".into()));
    }
    let ones = path.answers[pa..pb].iter().filter(|&&x| x).count();
    Ok(ones as f64 <= libm::ceil(k as f64 / t))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LegitimacyReport {
    pub samples: usize,
    pub found: usize,
    /// Paths whose sink is not a clique axiom, or that set too many variables to 1.
    pub malformed: usize,
    /// Forced answers that took the 1-edge; always 0 for a correct sampler.
    pub forced_ones: usize,
}

impl LegitimacyReport {
    pub fn fraction(&self) -> f64 {
        if self.samples == 0 {
            1.0
        } else {
            self.found as f64 / self.samples as f64
        }
    }
}

/// First pair `(a, b)` on the path, in path order, that is useful and traversed
/// frugally. `cache` memoises usefulness across paths of the same program.
#[allow(clippy::too_many_arguments)]
pub fn frugal_useful_pair(
    path: &PathState,
    g: &Graph,
    sides: &NodeSideSets,
    k: usize,
    t: f64,
    r: f64,
    q: f64,
    budget: u64,
    cache: &mut BTreeMap<(NodeId, NodeId), bool>,
) -> Result<Option<(NodeId, NodeId)>> {
    for (ia, &a) in path.nodes.iter().enumerate() {
        for &b in &path.nodes[ia..] {
            if !frugal_traversal(path, a, b, k, t)? {
                break;
            }
            let ok = match cache.get(&(a, b)) {
                Some(&ok) => ok,
                None => {
                    let ok = is_useful_pair(g, sides, a, b, r, q, budget)?.is_some();
                    cache.insert((a, b), ok);
                    ok
                }
            };
            if ok {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

/// Samples paths and, on each, looks for a frugally traversed useful pair.
#[allow(clippy::too_many_arguments)]
pub fn check_lemma_legitimate(
    p: &BranchingProgram,
    f_block: &CnfFormula,
    g: &Graph,
    part: &Partition,
    t: f64,
    r: f64,
    q: f64,
    samples: usize,
    cfg: &PathSampleConfig,
    budget: u64,
) -> Result<LegitimacyReport> {
    let sides = side_sets(p, part)?;
    let k = part.k();
    let mut useful: BTreeMap<(NodeId, NodeId), bool> = BTreeMap::new();
    let mut report = LegitimacyReport { samples, found: 0, malformed: 0, forced_ones: 0 };
    for j in 0..samples {
        let sp = sample_path(p, g, part, &sides, cfg, &mut cfg.rng(j as u64))?;
        let path = &sp.path;
        report.forced_ones += path.forced.iter().zip(&path.answers).filter(|&(&f, &a)| f && a).count();
        if !matches!(f_block.kind(sp.sink_clause), AxiomKind::Clique(_)) || path.ones() > k {
            report.malformed += 1;
        }
        let hit = frugal_useful_pair(path, g, &sides, k, t, r, q, budget, &mut useful)?.is_some();
        report.found += usize::from(hit);
    }
    Ok(report)
}

/// Decision tree querying `x_0, x_1, ..` in order, stopping as soon as an
/// axiom of the block encoding is falsified.
pub fn build_decision_tree_program(g: &Graph, part: &Partition) -> Result<SearchProgram> {
    if has_transversal_clique(g, part) {
        return Err(Error::HasTransversalClique);
    }
    let formula = encode_clique_block(g, part)?;
    let mut b = ProgramBuilder::new();
    let mut zeros_left: Vec<usize> = (0..part.k()).map(|i| part.block(i).len()).collect();
    let mut ones = Vec::new();
    let root = decide(g, part, &formula, &mut b, 0, &mut ones, &mut zeros_left)?;
    let program = b.finish(root)?;
    Ok(SearchProgram { program, formula })
}

fn decide(
    g: &Graph,
    part: &Partition,
    f: &CnfFormula,
    b: &mut ProgramBuilder,
    d: usize,
    ones: &mut Vec<usize>,
    zeros_left: &mut [usize],
) -> Result<NodeId> {
    if let Some(i) = zeros_left.iter().position(|&z| z == 0) {
        let c = Clause::new(part.block(i).iter().map(|&v| VarMap::block_var(v).pos()))?;
        return Ok(b.sink(f.expect(&c)?));
    }
    if d == g.n() {
        return Err(Error::Internal("decision tree ran out of variables".into()));
    }
    let x = VarMap::block_var(d);
    let bd = part.block_of(d);
    let hi = match ones.iter().find(|&&w| !g.has_edge(w, d) || part.block_of(w) == bd) {
        Some(&w) => {
            let c = Clause::new([VarMap::block_var(w).neg(), x.neg()])?;
            b.sink(f.expect(&c)?)
        }
        None => {
            ones.push(d);
            let id = decide(g, part, f, b, d + 1, ones, zeros_left);
            ones.pop();
            id?
        }
    };
    zeros_left[bd] -= 1;
    let lo = decide(g, part, f, b, d + 1, ones, zeros_left);
    zeros_left[bd] += 1;
    Ok(b.query(x, lo?, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::balanced_partition;
    use crate::robp::verify_search_program;

    fn instance() -> (Graph, Partition) {
        // Bipartite by parity, three blocks: no transversal triangle.
        let g = Graph::complete_multipartite(&(0..9).map(|v| v % 2).collect::<Vec<_>>());
        (g, balanced_partition(9, 3).unwrap())
    }

    #[test]
    fn decision_tree_verifies() {
        let (g, part) = instance();
        let sp = build_decision_tree_program(&g, &part).unwrap();
        verify_search_program(&sp.program, &sp.formula).unwrap();
        let k3 = Graph::complete(3);
        assert!(build_decision_tree_program(&k3, &balanced_partition(3, 3).unwrap()).is_err());
    }

    #[test]
    fn root_sides_are_empty() {
        let (g, part) = instance();
        let sp = build_decision_tree_program(&g, &part).unwrap();
        let sides = side_sets(&sp.program, &part).unwrap();
        assert!(sides.zeros(0).is_empty() && sides.ones(0).is_empty());
        assert!((0..3).all(|i| !sides.is_forgotten(0, i)));
    }

    #[test]
    fn diamond_forgets() {
        // Both answers on x_1 lead to the same query on x_2.
        let part = Partition::new(2, alloc::vec![alloc::vec![0, 1]]).unwrap();
        let nodes = [
            Node::Query { var: VarMap::block_var(0), lo: 1, hi: 1 },
            Node::Query { var: VarMap::block_var(1), lo: 2, hi: 3 },
            Node::Sink { clause: 0 },
            Node::Sink { clause: 1 },
        ];
        let p = BranchingProgram::new(&nodes, 0).unwrap();
        let sides = side_sets(&p, &part).unwrap();
        assert!(!sides.is_forgotten(0, 0));
        assert!(sides.is_forgotten(1, 0));
        assert!(sides.forgotten_vertices(1).contains(0));
        assert!(sides.is_forgotten(2, 0) && sides.is_forgotten(3, 0));
    }

    #[test]
    fn zero_bias_walks_all_zero() {
        let (g, part) = instance();
        let sp = build_decision_tree_program(&g, &part).unwrap();
        let sides = side_sets(&sp.program, &part).unwrap();
        let cfg = PathSampleConfig::with_bias(0.0, 1).unwrap();
        let s = sample_path(&sp.program, &g, &part, &sides, &cfg, &mut cfg.rng(0)).unwrap();
        assert_eq!(s.path.ones(), 0);
        assert_eq!(sp.formula.kind(s.sink_clause), AxiomKind::Clique(0));
    }

    #[test]
    fn frugal_boundaries() {
        let path = PathState {
            nodes: alloc::vec![0, 3, 5],
            answers: alloc::vec![true, true],
            forced: alloc::vec![false, false],
        };
        assert!(frugal_traversal(&path, 0, 0, 2, 2.0).unwrap());
        assert!(frugal_traversal(&path, 0, 3, 2, 2.0).unwrap());
        assert!(!frugal_traversal(&path, 0, 5, 2, 2.0).unwrap());
        assert!(frugal_traversal(&path, 0, 5, 2, 1.0).unwrap());
        assert!(frugal_traversal(&path, 3, 0, 2, 1.0).is_err());
        assert!(frugal_traversal(&path, 7, 0, 2, 1.0).is_err());
    }

    #[test]
    fn self_pair_not_useful() {
        let (g, part) = instance();
        let sp = build_decision_tree_program(&g, &part).unwrap();
        let sides = side_sets(&sp.program, &part).unwrap();
        for a in 0..sp.program.len() {
            assert_eq!(is_useful_pair(&g, &sides, a, a, 1.0, 1.0, u64::MAX).unwrap(), None);
        }
    }

    #[test]
    fn sampled_paths_end_at_clique_axioms() {
        let (g, part) = instance();
        let sp = build_decision_tree_program(&g, &part).unwrap();
        let cfg = PathSampleConfig::new(2.0, 0.5, 3).unwrap();
        let rep = check_lemma_legitimate(&sp.program, &sp.formula, &g, &part, 1.0, 0.0, 0.0, 200, &cfg, u64::MAX).unwrap();
        assert_eq!(rep.malformed, 0);
        assert_eq!(rep.forced_ones, 0);
        assert_eq!(rep.fraction(), 1.0);
    }
}
