use alloc::vec;
use alloc::vec::Vec;

use super::{extend_candidates, CutReason, Recorder, Solution, SolverOptions, TraceEvent};
use crate::graph::{degeneracy_removal_order, Graph, Partition};
use crate::set::VertexSet;

/// Search order: reverse of the minimum-degree removal order.
pub(super) fn cliquer_order(g: &Graph) -> Vec<usize> {
    let mut order = degeneracy_removal_order(g, &g.vertex_set());
    order.reverse();
    order
}

struct Run<'a> {
    g: &'a Graph,
    part: Option<&'a Partition>,
    /// Position of each vertex in the search order.
    pos: Vec<usize>,
    bounds: Vec<usize>,
    opts: SolverOptions,
    target: usize,
    rec: Recorder,
    found: bool,
    done: bool,
}

impl Run<'_> {
    fn expand(&mut self, mut h: VertexSet, solution: &mut Vec<usize>) {
        self.rec.stats.expand_calls += 1;
        self.rec.event(TraceEvent::Enter);
        if h.is_empty() {
            if solution.len() > self.rec.incumbent.len() {
                self.rec.improve(solution.clone());
                self.found = true;
                self.done = solution.len() >= self.target;
            }
            self.rec.event(TraceEvent::Leave);
            return;
        }
        // `h` holds positions; the smallest position is branched on first.
        while let Some(i) = h.first() {
            let inc = self.rec.incumbent.len();
            if self.opts.prune && solution.len() + h.len() <= inc {
                self.rec.cut(CutReason::Size);
                break;
            }
            if self.opts.prune && solution.len() + self.bounds[i] <= inc {
                self.rec.cut(CutReason::Bounds);
                break;
            }
            let v = self.order_vertex(i);
            self.rec.stats.nodes += 1;
            self.rec.event(TraceEvent::Take(v));
            solution.push(v);
            let next = self.candidates(&h, i);
            self.expand(next, solution);
            solution.pop();
            if self.found || self.done {
                break;
            }
            h.remove(i);
            self.rec.event(TraceEvent::Exclude(v));
        }
        self.rec.event(TraceEvent::Leave);
    }

    fn order_vertex(&self, i: usize) -> usize {
        self.rec.trace.order[i]
    }

    /// Positions of `h` adjacent to (and, in block mode, outside the block of) position `i`.
    fn candidates(&self, h: &VertexSet, i: usize) -> VertexSet {
        let n = self.g.n();
        let v = self.order_vertex(i);
        let hv = VertexSet::from_iter(n, h.iter().map(|p| self.rec.trace.order[p]));
        let next = extend_candidates(self.g, self.part, &hv, v);
        VertexSet::from_iter(n, next.iter().map(|u| self.pos[u]))
    }
}

pub fn cliquer(g: &Graph) -> Solution {
    cliquer_with(g, None, None, SolverOptions::default())
}

/// Cliquer with optional block restriction and an optional target size at
/// which the search stops.
pub fn cliquer_with(g: &Graph, part: Option<&Partition>, target: Option<usize>, opts: SolverOptions) -> Solution {
    let n = g.n();
    let order = cliquer_order(g);
    let mut pos = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        pos[v] = p;
    }
    let mut rec = Recorder::new(opts.trace);
    rec.trace.order = order;
    let mut run = Run {
        g,
        part,
        pos,
        bounds: vec![0; n],
        opts,
        target: target.unwrap_or(usize::MAX),
        rec,
        found: false,
        done: false,
    };
    if run.target == 0 {
        run.done = true;
    }
    for i in (0..n).rev() {
        if run.done {
            break;
        }
        run.found = false;
        let h = run.candidates(&VertexSet::range_from(n, i + 1), i);
        let mut solution = vec![run.order_vertex(i)];
        run.expand(h, &mut solution);
        run.bounds[i] = run.rec.incumbent.len();
        let value = run.bounds[i];
        run.rec.event(TraceEvent::Bound { position: i, value });
    }
    let mut rec = run.rec;
    rec.trace.bounds = run.bounds;
    Solution { clique: rec.incumbent, stats: rec.stats, trace: rec.trace }
}
