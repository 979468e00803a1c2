use alloc::vec;
use alloc::vec::Vec;

use super::{extend_candidates, CutReason, Recorder, Solution, SolverOptions, TraceEvent};
use crate::graph::{degeneracy_removal_order, Graph, Partition};
use crate::set::VertexSet;

/// Greedy sequential colouring of `G[h]` in smallest-last order, returned as
/// the vertices grouped by colour class (ascending) and `bounds[j]`, the number
/// of classes among `order[..=j]`.
pub fn colour_order(g: &Graph, h: &VertexSet) -> (Vec<usize>, Vec<usize>) {
    let mut seq = degeneracy_removal_order(g, h);
    seq.reverse();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in seq {
        match classes.iter_mut().find(|c| c.iter().all(|&u| !g.has_edge(u, v))) {
            Some(c) => c.push(v),
            None => classes.push(vec![v]),
        }
    }
    let mut order = Vec::with_capacity(h.len());
    let mut bounds = Vec::with_capacity(h.len());
    for (c, class) in classes.into_iter().enumerate() {
        for v in class {
            order.push(v);
            bounds.push(c + 1);
        }
    }
    (order, bounds)
}

/// Number of distinct blocks among `order[..=j]`, for every `j`.
pub(super) fn block_prefix_counts(part: &Partition, order: &[usize]) -> Vec<usize> {
    let mut seen = VertexSet::new(part.k());
    order
        .iter()
        .map(|&v| {
            seen.insert(part.block_of(v));
            seen.len()
        })
        .collect()
}

struct Run<'a> {
    g: &'a Graph,
    part: Option<&'a Partition>,
    opts: SolverOptions,
    /// Size to beat: the incumbent's, or `target - 1` in decision mode.
    floor: usize,
    target: usize,
    rec: Recorder,
    done: bool,
}

impl Run<'_> {
    fn expand(&mut self, h: VertexSet, solution: &mut Vec<usize>) {
        self.rec.stats.expand_calls += 1;
        self.rec.event(TraceEvent::Enter);
        let (order, bounds) = colour_order(self.g, &h);
        let blocks = self.part.map(|p| block_prefix_counts(p, &order));
        let mut h = h;
        for i in (0..order.len()).rev() {
            if self.opts.prune && solution.len() + bounds[i] <= self.floor {
                self.rec.cut(CutReason::Colour);
                break;
            }
            if let Some(b) = &blocks {
                if self.opts.prune && solution.len() + b[i] <= self.floor {
                    self.rec.cut(CutReason::Blocks);
                    break;
                }
            }
            let v = order[i];
            self.rec.stats.nodes += 1;
            self.rec.event(TraceEvent::Take(v));
            solution.push(v);
            let next = extend_candidates(self.g, self.part, &h, v);
            self.expand(next, solution);
            solution.pop();
            if self.done {
                break;
            }
            h.remove(v);
            self.rec.event(TraceEvent::Exclude(v));
        }
        if h.is_empty() && solution.len() > self.floor {
            self.rec.improve(solution.clone());
            self.floor = solution.len();
            self.done = solution.len() >= self.target;
        }
        self.rec.event(TraceEvent::Leave);
    }
}

pub fn max_clique_bb(g: &Graph) -> Solution {
    max_clique_bb_with(g, None, None, SolverOptions::default())
}

/// Colour-bounded branch and bound. With a target, the search only looks for
/// cliques of that size and stops at the first one.
pub fn max_clique_bb_with(g: &Graph, part: Option<&Partition>, target: Option<usize>, opts: SolverOptions) -> Solution {
    let floor = target.map_or(0, |k| k.saturating_sub(1));
    let mut run = Run { g, part, opts, floor, target: target.unwrap_or(usize::MAX), rec: Recorder::new(opts.trace), done: false };
    if target == Some(0) {
        return Solution { clique: Vec::new(), stats: run.rec.stats, trace: run.rec.trace };
    }
    run.expand(g.vertex_set(), &mut Vec::new());
    Solution { clique: run.rec.incumbent, stats: run.rec.stats, trace: run.rec.trace }
}
