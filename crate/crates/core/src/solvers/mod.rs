//! Russian-doll and colouring branch-and-bound clique search, with extraction
//! of read-once branching programs from the decision versions.

use alloc::vec::Vec;

use crate::graph::{Graph, Partition};
use crate::set::VertexSet;

mod cliquer;
mod extract;
mod maxclique;

pub use cliquer::{cliquer, cliquer_with};
pub use extract::{extract_robp_cliquer, extract_robp_maxclique, Extraction, SpliceInfo};
pub use maxclique::{colour_order, max_clique_bb, max_clique_bb_with};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Cliquer,
    MaxClique,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutReason {
    /// `|solution| + |V(H)| <= |incumbent|`.
    Size,
    /// `|solution| + bounds[i] <= |incumbent|` with Russian-doll bounds.
    Bounds,
    /// Colour-class bound of the current ordering.
    Colour,
    /// Fewer blocks left among the candidates than still needed.
    Blocks,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Enter,
    Leave,
    Take(usize),
    Exclude(usize),
    Cut(CutReason),
    Incumbent(usize),
    /// `bounds[position] = value` at the end of a main-loop iteration.
    Bound { position: usize, value: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expand_calls: u64,
    /// Branches taken, i.e. vertices added to the current solution.
    pub nodes: u64,
    pub size_cuts: u64,
    pub bounds_cuts: u64,
    pub colour_cuts: u64,
    pub block_cuts: u64,
    pub incumbent_history: Vec<usize>,
}

impl SearchStats {
    /// Nodes of the search tree: expand calls plus taken branches.
    pub fn tree_nodes(&self) -> u64 {
        self.expand_calls + self.nodes
    }

    fn cut(&mut self, why: CutReason) {
        match why {
            CutReason::Size => self.size_cuts += 1,
            CutReason::Bounds => self.bounds_cuts += 1,
            CutReason::Colour => self.colour_cuts += 1,
            CutReason::Blocks => self.block_cuts += 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolverTrace {
    pub events: Vec<TraceEvent>,
    /// Vertex at each position of the search order (Cliquer only).
    pub order: Vec<usize>,
    /// `bounds[p]`: largest clique found within positions `p..` (Cliquer only).
    pub bounds: Vec<usize>,
}

impl SolverTrace {
    /// Every `Enter` is closed by a later `Leave` and nesting never goes negative.
    pub fn is_balanced(&self) -> bool {
        let mut depth = 0i64;
        for e in &self.events {
            match e {
                TraceEvent::Enter => depth += 1,
                TraceEvent::Leave => {
                    depth -= 1;
                    if depth < 0 {
                        return false;
                    }
                }
                _ => {}
            }
        }
        depth == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverOptions {
    /// Apply the bound-based prunes. Disabling them changes only the statistics.
    pub prune: bool,
    pub trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { prune: true, trace: true }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub clique: Vec<usize>,
    pub stats: SearchStats,
    pub trace: SolverTrace,
}

/// Shared state of a run: statistics, optional trace, incumbent.
struct Recorder {
    stats: SearchStats,
    trace: SolverTrace,
    tracing: bool,
    incumbent: Vec<usize>,
}

impl Recorder {
    fn new(tracing: bool) -> Self {
        Recorder { stats: SearchStats::default(), trace: SolverTrace::default(), tracing, incumbent: Vec::new() }
    }

    fn event(&mut self, e: TraceEvent) {
        if self.tracing {
            self.trace.events.push(e);
        }
    }

    fn cut(&mut self, why: CutReason) {
        self.stats.cut(why);
        self.event(TraceEvent::Cut(why));
    }

    fn improve(&mut self, clique: Vec<usize>) {
        self.event(TraceEvent::Incumbent(clique.len()));
        self.stats.incumbent_history.push(clique.len());
        self.incumbent = clique;
    }
}

/// Candidates reachable from `v`: neighbours, minus `v`'s block in block mode.
fn extend_candidates(g: &Graph, part: Option<&Partition>, h: &VertexSet, v: usize) -> VertexSet {
    let mut next = h.intersection(g.neighbours(v));
    if let Some(p) = part {
        next.difference_with(p.block_set(p.block_of(v)));
    }
    next
}

/// Does `g` contain a `k`-clique, or with `part`, a clique with one vertex in every block?
pub fn clique_decision(g: &Graph, k: usize, part: Option<&Partition>, algo: Algo) -> bool {
    let k = part.map_or(k, Partition::k);
    let opts = SolverOptions { prune: true, trace: false };
    let sol = match algo {
        Algo::Cliquer => cliquer_with(g, part, Some(k), opts),
        Algo::MaxClique => max_clique_bb_with(g, part, Some(k), opts),
    };
    sol.clique.len() >= k
}
