//! Read-once branching programs simulating the block-decision searches.
//!
//! Both builders keep an explicit context: the set of vertices already queried
//! on the current path, the partial clique `R` answered 1 so far, and the
//! blocks `M` still missing from `R`. Whenever the search abandons a subtree,
//! the candidates it silently dropped are queried in a cleanup chain; each of
//! them conflicts with some member of `R`, so a 1 there ends in an edge or
//! functionality axiom, and the all-zero continuation has exactly the context
//! the next sub-program expects.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::cliquer::cliquer_order;
use super::maxclique::block_prefix_counts;
use super::{cliquer_with, colour_order, max_clique_bb_with, SearchStats, SolverOptions};
use crate::cnf::{encode_clique_block, Clause, CnfFormula, Var, VarMap};
use crate::error::{Error, Result};
use crate::graph::{has_transversal_clique, Graph, Partition};
use crate::robp::{verify_search_program, BranchingProgram, NodeId, ProgramBuilder};
use crate::set::VertexSet;

/// A program spliced in at a colour-bound cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpliceInfo {
    /// `|V(H)|` of the cut subgraph.
    pub vertices: usize,
    /// Blocks still needed at the cut.
    pub q: usize,
    /// Colours used on `H`, fewer than `q`.
    pub colours: usize,
    /// Nodes reachable from the splice root.
    pub nodes: usize,
}

impl SpliceInfo {
    /// `2^q q² |V(H)|²`.
    pub fn bound(&self) -> f64 {
        libm::pow(2.0, self.q as f64) * (self.q * self.q * self.vertices * self.vertices) as f64
    }
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub program: BranchingProgram,
    pub formula: CnfFormula,
    /// Statistics of the decision search the program simulates.
    pub stats: SearchStats,
    pub splices: Vec<SpliceInfo>,
}

struct Ctx<'a> {
    g: &'a Graph,
    part: &'a Partition,
    f: CnfFormula,
    b: ProgramBuilder,
}

impl Ctx<'_> {
    fn x(v: usize) -> Var {
        VarMap::block_var(v)
    }

    fn clique_sink(&mut self, block: usize) -> Result<NodeId> {
        let c = Clause::new(self.part.block(block).iter().map(|&v| Self::x(v).pos()))?;
        let idx = self.f.expect(&c)?;
        Ok(self.b.sink(idx))
    }

    fn conflicts(&self, u: usize, w: usize) -> bool {
        u != w && (!self.g.has_edge(u, w) || self.part.block_of(u) == self.part.block_of(w))
    }

    fn pair_sink(&mut self, u: usize, w: usize) -> Result<NodeId> {
        let c = Clause::new([Self::x(u).neg(), Self::x(w).neg()])?;
        let idx = self.f.expect(&c)?;
        Ok(self.b.sink(idx))
    }

    /// Queries `vs` in order; a 1 on `w` ends at the axiom for `w` and a
    /// conflicting member of `r`, all zeros continue at `tail`.
    fn cleanup(&mut self, vs: &[usize], r: &[usize], tail: NodeId) -> Result<NodeId> {
        let mut cur = tail;
        for &w in vs.iter().rev() {
            let &u = r
                .iter()
                .find(|&&u| self.conflicts(u, w))
                .ok_or_else(|| Error::Internal(format!("cleanup vertex {w} has no conflict in {r:?}")))?;
            let hit = self.pair_sink(u, w)?;
            cur = self.b.query(Self::x(w), cur, hit);
        }
        Ok(cur)
    }

    fn block_vertices(&self, blocks: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new(self.g.n());
        for l in blocks.iter() {
            out.union_with(self.part.block_set(l));
        }
        out
    }
}

fn check_instance(g: &Graph, part: &Partition) -> Result<CnfFormula> {
    if part.k() == 0 {
        return Err(Error::InvalidPartition("need at least one block".into()));
    }
    if has_transversal_clique(g, part) {
        return Err(Error::HasTransversalClique);
    }
    encode_clique_block(g, part)
}

struct CliquerBuild<'a> {
    ctx: Ctx<'a>,
    order: Vec<usize>,
    bounds: Vec<usize>,
    /// Largest position of each block, if non-empty.
    last_pos: Vec<Option<usize>>,
    memo: BTreeMap<(usize, VertexSet), NodeId>,
}

impl CliquerBuild<'_> {
    fn block_at(&self, p: usize) -> usize {
        self.ctx.part.block_of(self.order[p])
    }

    /// Program for the context "every vertex of an `m`-block at a position
    /// below `j` is 0", looking for a clique hitting every block of `m`.
    fn jump(&mut self, j: usize, m: &VertexSet) -> Result<NodeId> {
        let n = self.order.len();
        let j = (j..n).find(|&p| m.contains(self.block_at(p))).unwrap_or(n);
        if let Some(&id) = self.memo.get(&(j, m.clone())) {
            return Ok(id);
        }
        if m.is_empty() {
            return Err(Error::Internal("all blocks covered: transversal clique".into()));
        }
        let id = match m.iter().find(|&l| self.last_pos[l].is_none_or(|p| p < j)) {
            Some(l) => self.ctx.clique_sink(l)?,
            None => {
                let u = self.order[j];
                let lo = self.jump(j + 1, m)?;
                let mut m_r = m.clone();
                m_r.remove(self.ctx.part.block_of(u));
                let cands = self.candidates(&VertexSet::range_from(n, j + 1), u, &m_r);
                let mut queried = VertexSet::new(n);
                queried.insert(j);
                let hi = self.expand(&mut vec![u], &cands, &m_r, &mut queried, j)?;
                self.ctx.b.query(Ctx::x(u), lo, hi)
            }
        };
        self.memo.insert((j, m.clone()), id);
        Ok(id)
    }

    /// Positions of `h` adjacent to `v` whose block lies in `m`.
    fn candidates(&self, h: &VertexSet, v: usize, m: &VertexSet) -> VertexSet {
        let mut out = VertexSet::new(self.order.len());
        for p in h.iter() {
            let w = self.order[p];
            if self.ctx.g.has_edge(v, w) && m.contains(self.ctx.part.block_of(w)) {
                out.insert(p);
            }
        }
        out
    }

    /// Unqueried positions from `j0` on, below `limit`, whose block is in `blocks`.
    fn unqueried(&self, j0: usize, limit: usize, blocks: &VertexSet, queried: &VertexSet) -> Vec<usize> {
        (j0..limit)
            .filter(|&p| !queried.contains(p) && blocks.contains(self.block_at(p)))
            .map(|p| self.order[p])
            .collect()
    }

    fn expand(
        &mut self,
        r: &mut Vec<usize>,
        cands: &VertexSet,
        m_r: &VertexSet,
        queried: &mut VertexSet,
        j0: usize,
    ) -> Result<NodeId> {
        let n = self.order.len();
        if m_r.is_empty() {
            return Err(Error::Internal("transversal clique reached".into()));
        }
        let present: VertexSet = VertexSet::from_iter(self.ctx.part.k(), cands.iter().map(|p| self.block_at(p)));
        let missing: Vec<usize> = m_r.iter().filter(|&l| !present.contains(l)).collect();
        if !missing.is_empty() {
            let best = missing
                .into_iter()
                .map(|l| (self.unqueried(j0, n, &VertexSet::from_iter(self.ctx.part.k(), [l]), queried), l))
                .min_by_key(|(vs, l)| (vs.len(), *l))
                .expect("non-empty");
            let tail = self.ctx.clique_sink(best.1)?;
            return self.ctx.cleanup(&best.0, r, tail);
        }
        let p = cands.first().expect("every block present");
        if self.bounds[p] < m_r.len() {
            let vs = self.unqueried(j0, p, m_r, queried);
            let tail = self.jump(p, m_r)?;
            return self.ctx.cleanup(&vs, r, tail);
        }
        let v = self.order[p];
        queried.insert(p);
        let mut rest = cands.clone();
        rest.remove(p);
        let mut m2 = m_r.clone();
        m2.remove(self.ctx.part.block_of(v));
        let next = self.candidates(&rest, v, &m2);
        r.push(v);
        let hi = self.expand(r, &next, &m2, queried, j0);
        r.pop();
        let lo = self.expand(r, &rest, m_r, queried, j0);
        queried.remove(p);
        Ok(self.ctx.b.query(Ctx::x(v), lo?, hi?))
    }
}

/// Program simulating the block-decision Cliquer run on `(g, part)`.
pub fn extract_robp_cliquer(g: &Graph, part: &Partition) -> Result<Extraction> {
    let f = check_instance(g, part)?;
    let opts = SolverOptions { prune: true, trace: true };
    let run = cliquer_with(g, Some(part), Some(part.k()), opts);
    let order = cliquer_order(g);
    debug_assert_eq!(order, run.trace.order);
    let n = g.n();
    let mut pos = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    let last_pos = (0..part.k()).map(|l| part.block(l).iter().map(|&v| pos[v]).max()).collect();
    let mut build = CliquerBuild {
        ctx: Ctx { g, part, f, b: ProgramBuilder::new() },
        order,
        bounds: run.trace.bounds.clone(),
        last_pos,
        memo: BTreeMap::new(),
    };
    let root = build.jump(0, &VertexSet::full(part.k()))?;
    let program = build.ctx.b.finish(root)?;
    verify_search_program(&program, &build.ctx.f)?;
    Ok(Extraction { program, formula: build.ctx.f, stats: run.stats, splices: Vec::new() })
}

struct MaxBuild<'a> {
    ctx: Ctx<'a>,
    splice_memo: BTreeMap<(VertexSet, VertexSet), NodeId>,
    alg_memo: BTreeMap<(VertexSet, VertexSet), NodeId>,
    splices: Vec<SpliceInfo>,
}

impl MaxBuild<'_> {
    fn expand(&mut self, h: &VertexSet, r: &mut Vec<usize>, m_r: &VertexSet, queried: &mut VertexSet) -> Result<NodeId> {
        if m_r.is_empty() {
            return Err(Error::Internal("transversal clique reached".into()));
        }
        let (order, bounds) = colour_order(self.ctx.g, h);
        let blocks = block_prefix_counts(self.ctx.part, &order);
        self.step(&order, &bounds, &blocks, order.len(), r, m_r, queried)
    }

    #[allow(clippy::too_many_arguments)]
    fn step(
        &mut self,
        order: &[usize],
        bounds: &[usize],
        blocks: &[usize],
        i: usize,
        r: &mut Vec<usize>,
        m_r: &VertexSet,
        queried: &mut VertexSet,
    ) -> Result<NodeId> {
        let need = m_r.len();
        if i == 0 || bounds[i - 1] < need || blocks[i - 1] < need {
            return self.cut(&order[..i], &bounds[..i], r, m_r, queried);
        }
        let v = order[i - 1];
        let part = self.ctx.part;
        queried.insert(v);
        let u_set = VertexSet::from_iter(self.ctx.g.n(), order[..i].iter().copied());
        let mut next = u_set.intersection(self.ctx.g.neighbours(v));
        next.difference_with(part.block_set(part.block_of(v)));
        let mut m2 = m_r.clone();
        m2.remove(part.block_of(v));
        r.push(v);
        let hi = self.expand(&next, r, &m2, queried);
        r.pop();
        let lo = self.step(order, bounds, blocks, i - 1, r, m_r, queried);
        queried.remove(v);
        Ok(self.ctx.b.query(Ctx::x(v), lo?, hi?))
    }

    /// Leaf of the search tree with candidate prefix `u`, coloured by `bounds`.
    fn cut(&mut self, u: &[usize], bounds: &[usize], r: &[usize], m_r: &VertexSet, queried: &VertexSet) -> Result<NodeId> {
        let (g, part) = (self.ctx.g, self.ctx.part);
        let u_set = VertexSet::from_iter(g.n(), u.iter().copied());
        let present = VertexSet::from_iter(part.k(), u.iter().map(|&v| part.block_of(v)));
        let outside = |vs: &VertexSet| -> Vec<usize> { vs.iter().filter(|&w| !queried.contains(w) && !u_set.contains(w)).collect() };
        let missing = m_r.iter().filter(|&l| !present.contains(l)).min_by_key(|&l| (outside(part.block_set(l)).len(), l));
        if let Some(l) = missing {
            let vs = outside(part.block_set(l));
            let tail = self.ctx.clique_sink(l)?;
            return self.ctx.cleanup(&vs, r, tail);
        }
        let vs = outside(&self.ctx.block_vertices(m_r));
        let tail = self.splice(u, bounds, m_r)?;
        self.ctx.cleanup(&vs, r, tail)
    }

    /// Refutes a clique hitting every block of `m` inside `u`, using that the
    /// colouring in `bounds` has fewer than `|m|` colours.
    fn splice(&mut self, u: &[usize], bounds: &[usize], m: &VertexSet) -> Result<NodeId> {
        let u_set = VertexSet::from_iter(self.ctx.g.n(), u.iter().copied());
        let key = (u_set.clone(), m.clone());
        if let Some(&id) = self.splice_memo.get(&key) {
            return Ok(id);
        }
        let mut colour = vec![usize::MAX; self.ctx.g.n()];
        for (j, &v) in u.iter().enumerate() {
            colour[v] = bounds[j] - 1;
        }
        let colours = bounds.last().copied().unwrap_or(0);
        if colours >= m.len() {
            return Err(Error::Internal("splice without a colour deficit".into()));
        }
        let id = self.blocks_search(&u_set, m, &colour)?;
        self.splice_memo.insert(key, id);
        self.splices.push(SpliceInfo { vertices: u.len(), q: m.len(), colours, nodes: self.ctx.b.reachable_from(id) });
        Ok(id)
    }

    /// Context: every vertex of an `m`-block outside `w` is 0. Chooses a vertex
    /// of the last block of `m`, then keeps only other-coloured vertices.
    fn blocks_search(&mut self, w: &VertexSet, m: &VertexSet, colour: &[usize]) -> Result<NodeId> {
        let key = (w.clone(), m.clone());
        if let Some(&id) = self.alg_memo.get(&key) {
            return Ok(id);
        }
        let part = self.ctx.part;
        let id = if let Some(l) = m.iter().find(|&l| w.is_disjoint(part.block_set(l))) {
            self.ctx.clique_sink(l)?
        } else {
            let l = m.last().ok_or_else(|| Error::Internal("colour bound violated".into()))?;
            let mut m2 = m.clone();
            m2.remove(l);
            let rest = w.intersection(&self.ctx.block_vertices(&m2));
            let here: Vec<usize> = w.intersection(part.block_set(l)).to_vec();
            let mut on_one = Vec::with_capacity(here.len());
            for &v in &here {
                let (same, other): (Vec<usize>, Vec<usize>) = rest.iter().partition(|&x| colour[x] == colour[v]);
                let next = VertexSet::from_iter(self.ctx.g.n(), other);
                let cont = self.blocks_search(&next, &m2, colour)?;
                on_one.push(self.ctx.cleanup(&same, &[v], cont)?);
            }
            let tail = self.ctx.clique_sink(l)?;
            let vars: Vec<Var> = here.iter().map(|&v| Ctx::x(v)).collect();
            self.ctx.b.chain(&vars, &on_one, tail)
        };
        self.alg_memo.insert(key, id);
        Ok(id)
    }
}

/// Program simulating the block-decision colour branch and bound on `(g, part)`.
pub fn extract_robp_maxclique(g: &Graph, part: &Partition) -> Result<Extraction> {
    let f = check_instance(g, part)?;
    let opts = SolverOptions { prune: true, trace: false };
    let run = max_clique_bb_with(g, Some(part), Some(part.k()), opts);
    let mut build = MaxBuild {
        ctx: Ctx { g, part, f, b: ProgramBuilder::new() },
        splice_memo: BTreeMap::new(),
        alg_memo: BTreeMap::new(),
        splices: Vec::new(),
    };
    let mut queried = VertexSet::new(g.n());
    let root = build.expand(&g.vertex_set(), &mut Vec::new(), &VertexSet::full(part.k()), &mut queried)?;
    let program = build.ctx.b.finish(root)?;
    verify_search_program(&program, &build.ctx.f)?;
    Ok(Extraction { program, formula: build.ctx.f, stats: run.stats, splices: build.splices })
}
