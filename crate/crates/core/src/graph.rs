//! Simple undirected graphs, vertex partitions and random graph sampling.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::set::VertexSet;

/// Largest vertex count accepted by the exhaustive clique oracles.
pub const ORACLE_LIMIT: usize = 64;

/// A simple undirected graph on `0..n`. Immutable once built.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<VertexSet>,
}

impl core::fmt::Debug for Graph {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![VertexSet::new(n); n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::empty(n);
        if n >= 3 {
            for v in 0..n {
                g.add_edge(v, (v + 1) % n);
            }
        }
        g
    }

    /// Complete multipartite graph: `u ~ v` iff `label[u] != label[v]`.
    pub fn complete_multipartite(labels: &[usize]) -> Self {
        let n = labels.len();
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if labels[u] != labels[v] {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    fn add_edge(&mut self, u: usize, v: usize) {
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbours(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| self.adj[u].iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter()
            .enumerate()
            .all(|(i, &u)| vs[i + 1..].iter().all(|&v| u != v && self.has_edge(u, v)))
    }

    /// Induced subgraph on `vs` (ascending), relabelled to `0..|vs|`.
    /// Returns the graph and the map from new labels to old ones.
    pub fn induced(&self, vs: &VertexSet) -> (Graph, Vec<usize>) {
        let map = vs.to_vec();
        let mut g = Graph::empty(map.len());
        for (i, &u) in map.iter().enumerate() {
            for (j, &v) in map.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        (g, map)
    }

    /// Is `self` a subgraph of `other` on the same vertex set?
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n() == other.n() && (0..self.n()).all(|v| self.adj[v].is_subset(&other.adj[v]))
    }
}

/// Common neighbourhood of `r` inside `w`. For empty `r` this is `w` itself.
pub fn common_neighbourhood(g: &Graph, r: &[usize], w: &VertexSet) -> VertexSet {
    let mut out = w.clone();
    for &v in r {
        out.intersect_with(g.neighbours(v));
    }
    out
}

/// An ordered partition of the vertices into blocks `V_0, .., V_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
    sets: Vec<VertexSet>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut block_of = vec![usize::MAX; n];
        let mut blocks = blocks;
        for (i, b) in blocks.iter_mut().enumerate() {
            b.sort_unstable();
            for &v in b.iter() {
                if v >= n {
                    return Err(Error::InvalidPartition(format!("vertex {v} out of range")));
                }
                if block_of[v] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("vertex {v} in two blocks")));
                }
                block_of[v] = i;
            }
        }
        if let Some(v) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidPartition(format!("vertex {v} not covered")));
        }
        let sets = blocks.iter().map(|b| VertexSet::from_iter(n, b.iter().copied())).collect();
        Ok(Partition { blocks, block_of, sets })
    }

    /// Partition from a block label per vertex. Labels must lie in `0..k`.
    pub fn from_labels(labels: &[usize], k: usize) -> Result<Self> {
        let mut blocks = vec![Vec::new(); k];
        for (v, &l) in labels.iter().enumerate() {
            if l >= k {
                return Err(Error::InvalidPartition(format!("label {l} of vertex {v} exceeds k={k}")));
            }
            blocks[l].push(v);
        }
        Self::new(labels.len(), blocks)
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn n(&self) -> usize {
        self.block_of.len()
    }

    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    pub fn block_set(&self, i: usize) -> &VertexSet {
        &self.sets[i]
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.block_of[v]
    }

    pub fn is_balanced(&self) -> bool {
        let min = self.blocks.iter().map(Vec::len).min().unwrap_or(0);
        let max = self.blocks.iter().map(Vec::len).max().unwrap_or(0);
        max - min <= 1
    }
}

/// Contiguous blocks whose sizes differ by at most one.
pub fn balanced_partition(n: usize, k: usize) -> Result<Partition> {
    if k == 0 {
        return Err(Error::InvalidParameter("partition needs k >= 1".into()));
    }
    let (q, rem) = (n / k, n % k);
    let mut blocks = Vec::with_capacity(k);
    let mut next = 0;
    for i in 0..k {
        let size = q + usize::from(i < rem);
        blocks.push((next..next + size).collect());
        next += size;
    }
    Partition::new(n, blocks)
}

/// Parameters of the Erdős–Rényi model with `p = n^(-2 xi / (k-1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErParams {
    pub n: usize,
    pub k: usize,
    pub xi: f64,
    pub seed: u64,
}

impl ErParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        if self.k < 2 {
            return Err(Error::InvalidParameter("k must be at least 2".into()));
        }
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return Err(Error::InvalidParameter(format!("xi must be positive, got {}", self.xi)));
        }
        Ok(())
    }

    pub fn edge_probability(&self) -> f64 {
        libm::pow(self.n as f64, -2.0 * self.xi / (self.k as f64 - 1.0))
    }
}

/// The uniform draw in `[0, 1)` deciding the pair `{u, v}`.
///
/// Each unordered pair owns its own ChaCha8 stream, so the decision for a pair
/// does not depend on `n` or on the order in which pairs are visited.
pub fn pair_uniform(seed: u64, u: usize, v: usize) -> f64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((a as u64) << 32) | b as u64);
    rng.set_word_pos(0);
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("edge probability {p} outside [0,1]")));
    }
    if n > u32::MAX as usize {
        return Err(Error::TooLarge(format!("n = {n}")));
    }
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if pair_uniform(seed, u, v) < p {
                g.add_edge(u, v);
            }
        }
    }
    Ok(g)
}

pub fn sample_er(params: &ErParams) -> Result<Graph> {
    params.validate()?;
    sample_gnp(params.n, params.edge_probability(), params.seed)
}

fn check_oracle_size(g: &Graph) -> Result<()> {
    if g.n() > ORACLE_LIMIT {
        return Err(Error::TooLarge(format!("oracle limited to {ORACLE_LIMIT} vertices, got {}", g.n())));
    }
    Ok(())
}

/// Visits every clique `R` (including the empty one) exactly once, extending
/// by larger vertices only. `f` returns false to stop early; cliques larger
/// than `max_size` are not visited.
pub fn for_each_clique<F>(g: &Graph, max_size: usize, mut f: F)
where
    F: FnMut(&[usize]) -> bool,
{
    fn rec<F: FnMut(&[usize]) -> bool>(
        g: &Graph,
        r: &mut Vec<usize>,
        cand: &VertexSet,
        max_size: usize,
        f: &mut F,
    ) -> bool {
        if !f(r) {
            return false;
        }
        if r.len() == max_size {
            return true;
        }
        for v in cand.iter() {
            let mut next = cand.intersection(g.neighbours(v));
            next.difference_with(&VertexSet::from_iter(g.n(), 0..=v));
            r.push(v);
            let go_on = rec(g, r, &next, max_size, f);
            r.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
    rec(g, &mut Vec::new(), &g.vertex_set(), max_size, &mut f);
}

/// Exhaustive maximum clique. The lexicographically first one among the
/// largest is returned.
pub fn max_clique_brute(g: &Graph) -> Result<Vec<usize>> {
    check_oracle_size(g)?;
    let mut best: Vec<usize> = Vec::new();
    for_each_clique(g, usize::MAX, |r| {
        if r.len() > best.len() {
            best = r.to_vec();
        }
        true
    });
    Ok(best)
}

/// Does `g` contain a clique on `k` vertices?
pub fn has_clique_of_size(g: &Graph, k: usize) -> bool {
    let mut found = false;
    for_each_clique(g, k, |r| {
        found = r.len() >= k;
        !found
    });
    found
}

/// A clique with exactly one vertex in every block, if any.
pub fn find_transversal_clique(g: &Graph, part: &Partition) -> Option<Vec<usize>> {
    fn rec(g: &Graph, part: &Partition, i: usize, cand: &VertexSet, r: &mut Vec<usize>) -> bool {
        if i == part.k() {
            return true;
        }
        for &v in part.block(i) {
            if cand.contains(v) {
                r.push(v);
                let next = cand.intersection(g.neighbours(v));
                if rec(g, part, i + 1, &next, r) {
                    return true;
                }
                r.pop();
            }
        }
        false
    }
    let mut r = Vec::new();
    rec(g, part, 0, &g.vertex_set(), &mut r).then_some(r)
}

pub fn has_transversal_clique(g: &Graph, part: &Partition) -> bool {
    find_transversal_clique(g, part).is_some()
}

/// Smallest-first greedy colouring in vertex order.
pub fn greedy_colouring(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut colour = vec![usize::MAX; n];
    for v in 0..n {
        let mut used = VertexSet::new(n + 1);
        for u in g.neighbours(v).iter() {
            if colour[u] != usize::MAX {
                used.insert(colour[u]);
            }
        }
        colour[v] = (0..=n).find(|&c| !used.contains(c)).unwrap_or(0);
    }
    colour
}

pub fn is_proper_colouring(g: &Graph, colour: &[usize]) -> bool {
    colour.len() == g.n() && g.edges().all(|(u, v)| colour[u] != colour[v])
}

/// Vertices of `within` in the order they are removed when repeatedly
/// deleting a vertex of minimum degree (ties broken by smallest label).
pub fn degeneracy_removal_order(g: &Graph, within: &VertexSet) -> Vec<usize> {
    let mut alive = within.clone();
    let mut deg: Vec<usize> = (0..g.n()).map(|v| g.neighbours(v).intersection_len(within)).collect();
    let mut order = Vec::with_capacity(within.len());
    while let Some(v) = alive.iter().min_by_key(|&v| (deg[v], v)) {
        alive.remove(v);
        order.push(v);
        for u in g.neighbours(v).iter() {
            if alive.contains(u) {
                deg[u] -= 1;
            }
        }
    }
    order
}
