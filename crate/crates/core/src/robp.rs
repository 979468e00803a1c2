//! Branching programs over CNF variables whose sinks name falsified clauses.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::assignment::Assignment;
use crate::cnf::{CnfFormula, Var};
use crate::error::{Error, Result};
use crate::proof::ResolutionProof;
use crate::set::VertexSet;

pub type NodeId = usize;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Node {
    /// Query `var`; follow `lo` on 0 and `hi` on 1.
    Query { var: Var, lo: NodeId, hi: NodeId },
    /// Sink labelled with a clause index of the formula.
    Sink { clause: usize },
}

/// A rooted DAG of query nodes and sinks.
///
/// Nodes are stored in topological order: the root is node 0 and every edge
/// points to a larger index. Only nodes reachable from the root are kept.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BranchingProgram {
    nodes: Vec<Node>,
}

impl BranchingProgram {
    /// Validates `nodes`, drops unreachable ones and renumbers topologically.
    pub fn new(nodes: &[Node], root: NodeId) -> Result<Self> {
        let bad = |m: alloc::string::String| Error::InvalidProgram(m);
        if root >= nodes.len() {
            return Err(bad(format!("root {root} out of range")));
        }
        for (i, n) in nodes.iter().enumerate() {
            if let Node::Query { lo, hi, .. } = *n {
                if lo >= nodes.len() || hi >= nodes.len() {
                    return Err(bad(format!("node {i} has an edge out of range")));
                }
            }
        }
        // Iterative DFS post-order, then reverse.
        const WHITE: u8 = 0;
        const GREY: u8 = 1;
        const BLACK: u8 = 2;
        let mut colour = vec![WHITE; nodes.len()];
        let mut post = Vec::new();
        let mut stack = vec![(root, 0u8)];
        colour[root] = GREY;
        while let Some(&mut (v, ref mut state)) = stack.last_mut() {
            let next = match (nodes[v], *state) {
                (Node::Query { lo, .. }, 0) => Some(lo),
                (Node::Query { hi, .. }, 1) => Some(hi),
                _ => None,
            };
            *state += 1;
            match next {
                Some(c) if colour[c] == GREY => return Err(bad(format!("cycle through node {c}"))),
                Some(c) if colour[c] == WHITE => {
                    colour[c] = GREY;
                    stack.push((c, 0));
                }
                Some(_) => {}
                None => {
                    colour[v] = BLACK;
                    post.push(v);
                    stack.pop();
                }
            }
        }
        post.reverse();
        let mut new_id = vec![usize::MAX; nodes.len()];
        for (i, &v) in post.iter().enumerate() {
            new_id[v] = i;
        }
        let out = post
            .iter()
            .map(|&v| match nodes[v] {
                Node::Query { var, lo, hi } => Node::Query { var, lo: new_id[lo], hi: new_id[hi] },
                s => s,
            })
            .collect();
        Ok(BranchingProgram { nodes: out })
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn max_var(&self) -> usize {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Query { var, .. } => Some(var.index()),
                Node::Sink { .. } => None,
            })
            .max()
            .unwrap_or(0)
    }

    fn child(&self, id: NodeId, answer: bool) -> NodeId {
        match self.nodes[id] {
            Node::Query { lo, hi, .. } => {
                if answer {
                    hi
                } else {
                    lo
                }
            }
            Node::Sink { .. } => id,
        }
    }
}

/// Builds programs bottom-up. Sinks are shared per clause, identical query
/// nodes are merged and queries with equal children are skipped.
#[derive(Default)]
pub struct ProgramBuilder {
    nodes: Vec<Node>,
    unique: BTreeMap<Node, NodeId>,
}

impl ProgramBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, n: Node) -> NodeId {
        if let Some(&id) = self.unique.get(&n) {
            return id;
        }
        self.nodes.push(n);
        self.unique.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    pub fn sink(&mut self, clause: usize) -> NodeId {
        self.intern(Node::Sink { clause })
    }

    pub fn query(&mut self, var: Var, lo: NodeId, hi: NodeId) -> NodeId {
        if lo == hi {
            return lo;
        }
        self.intern(Node::Query { var, lo, hi })
    }

    /// A chain querying `vars` in order: a 1 on `vars[j]` goes to `on_one[j]`,
    /// all 0s end at `tail`.
    pub fn chain(&mut self, vars: &[Var], on_one: &[NodeId], tail: NodeId) -> NodeId {
        let mut cur = tail;
        for (j, &x) in vars.iter().enumerate().rev() {
            cur = self.query(x, cur, on_one[j]);
        }
        cur
    }

    pub fn allocated(&self) -> usize {
        self.nodes.len()
    }

    /// Number of nodes reachable from `root`.
    pub fn reachable_from(&self, root: NodeId) -> usize {
        let mut seen = VertexSet::new(self.nodes.len());
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            if seen.contains(v) {
                continue;
            }
            seen.insert(v);
            if let Node::Query { lo, hi, .. } = self.nodes[v] {
                stack.push(lo);
                stack.push(hi);
            }
        }
        seen.len()
    }

    pub fn finish(self, root: NodeId) -> Result<BranchingProgram> {
        BranchingProgram::new(&self.nodes, root)
    }
}

/// A root-to-sink path with the answer given at every query node.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PathState {
    pub nodes: Vec<NodeId>,
    /// `answers[j]` is the answer at `nodes[j]`.
    pub answers: Vec<bool>,
    /// Whether each answer was forced rather than drawn at random.
    pub forced: Vec<bool>,
}

impl PathState {
    pub fn sink(&self) -> NodeId {
        *self.nodes.last().expect("paths are non-empty")
    }

    /// The partial assignment the path reads off.
    pub fn assignment(&self, p: &BranchingProgram, num_vars: usize) -> Result<Assignment> {
        let mut a = Assignment::new(num_vars);
        for (j, &ans) in self.answers.iter().enumerate() {
            if let Node::Query { var, .. } = p.node(self.nodes[j]) {
                a.set(var, ans)?;
            }
        }
        Ok(a)
    }

    pub fn ones(&self) -> usize {
        self.answers.iter().filter(|&&b| b).count()
    }
}

/// The path followed by a total assignment.
pub fn path_of(p: &BranchingProgram, alpha: &Assignment) -> Result<PathState> {
    let mut path = PathState { nodes: vec![p.root()], answers: Vec::new(), forced: Vec::new() };
    let mut cur = p.root();
    while let Node::Query { var, .. } = p.node(cur) {
        let ans = alpha
            .get(var)
            .ok_or_else(|| Error::InvalidParameter(format!("variable {} unassigned", var.index())))?;
        cur = p.child(cur, ans);
        path.nodes.push(cur);
        path.answers.push(ans);
        path.forced.push(false);
    }
    Ok(path)
}

/// Follows `answer` from the root; `answer` returns the bit and whether it was forced.
pub fn walk<F>(p: &BranchingProgram, mut answer: F) -> PathState
where
    F: FnMut(NodeId, Var) -> (bool, bool),
{
    let mut path = PathState { nodes: vec![p.root()], answers: Vec::new(), forced: Vec::new() };
    let mut cur = p.root();
    while let Node::Query { var, .. } = p.node(cur) {
        let (ans, forced) = answer(cur, var);
        cur = p.child(cur, ans);
        path.nodes.push(cur);
        path.answers.push(ans);
        path.forced.push(forced);
    }
    path
}

fn var_capacity(p: &BranchingProgram, num_vars: usize) -> usize {
    num_vars.max(p.max_var())
}

/// For every node, the set of variables queried on some path from the root to it
/// (not including the node itself).
pub fn queried_before(p: &BranchingProgram, num_vars: usize) -> Vec<VertexSet> {
    let cap = var_capacity(p, num_vars) + 1;
    let mut q = vec![VertexSet::new(cap); p.len()];
    for a in 0..p.len() {
        if let Node::Query { var, lo, hi } = p.node(a) {
            let mut s = q[a].clone();
            s.insert(var.index());
            q[lo].union_with(&s);
            q[hi].union_with(&s);
        }
    }
    q
}

/// Fails with the first node re-querying a variable on some path.
pub fn check_read_once(p: &BranchingProgram) -> Result<()> {
    let q = queried_before(p, 0);
    for (a, node) in p.nodes().iter().enumerate() {
        if let Node::Query { var, .. } = *node {
            if q[a].contains(var.index()) {
                return Err(Error::NotReadOnce { node: a, var: var.index() as u32 });
            }
        }
    }
    Ok(())
}

pub fn is_read_once(p: &BranchingProgram) -> bool {
    check_read_once(p).is_ok()
}

/// `β(a)` for every node: the assignments common to all root-to-`a` paths.
/// Only meaningful for read-once programs, so that is checked first.
pub fn betas(p: &BranchingProgram, num_vars: usize) -> Result<Vec<Assignment>> {
    check_read_once(p)?;
    let nv = var_capacity(p, num_vars);
    let mut beta: Vec<Option<Assignment>> = vec![None; p.len()];
    beta[0] = Some(Assignment::new(nv));
    for a in 0..p.len() {
        let ba = beta[a].clone().ok_or_else(|| Error::Internal("unreachable node".into()))?;
        if let Node::Query { var, lo, hi } = p.node(a) {
            for (child, val) in [(lo, false), (hi, true)] {
                let ext = ba.with(var, val)?;
                beta[child] = Some(match beta[child].take() {
                    None => ext,
                    Some(b) => b.meet(&ext),
                });
            }
        }
        beta[a] = Some(ba);
    }
    Ok(beta.into_iter().map(|b| b.expect("all nodes are reachable")).collect())
}

/// Read-once, and every sink's clause is falsified by its `β`.
pub fn verify_search_program(p: &BranchingProgram, f: &CnfFormula) -> Result<()> {
    if p.max_var() > f.num_vars() {
        return Err(Error::InvalidProgram(format!("variable {} not in the formula", p.max_var())));
    }
    let beta = betas(p, f.num_vars())?;
    for (a, node) in p.nodes().iter().enumerate() {
        if let Node::Sink { clause } = *node {
            if clause >= f.len() {
                return Err(Error::InvalidProgram(format!("sink {a} names clause {clause} of {}", f.len())));
            }
            if !beta[a].falsifies(f.clause(clause)) {
                return Err(Error::InvalidProgram(format!(
                    "sink {a}: clause {:?} not falsified by its assignment",
                    f.clause(clause)
                )));
            }
        }
    }
    Ok(())
}

/// Turns a verified search program into a regular refutation with at most
/// one step per node.
pub fn robp_to_refutation(p: &BranchingProgram, f: &CnfFormula) -> Result<ResolutionProof> {
    verify_search_program(p, f)?;
    let mut proof = ResolutionProof::new();
    let mut axiom_step: BTreeMap<usize, usize> = BTreeMap::new();
    let mut step = vec![usize::MAX; p.len()];
    for a in (0..p.len()).rev() {
        step[a] = match p.node(a) {
            Node::Sink { clause } => {
                *axiom_step.entry(clause).or_insert_with(|| proof.push_axiom(f.clause(clause).clone()))
            }
            Node::Query { var, lo, hi } => {
                let (s0, s1) = (step[lo], step[hi]);
                let c0 = &proof.steps()[s0].clause;
                let c1 = &proof.steps()[s1].clause;
                if !c0.contains(var.pos()) {
                    s0
                } else if !c1.contains(var.neg()) {
                    s1
                } else {
                    proof.push_resolvent(s0, s1, var)?
                }
            }
        };
    }
    let last = step[0];
    if !proof.steps()[last].clause.is_empty() {
        return Err(Error::Internal("root clause is not empty".into()));
    }
    Ok(proof.pruned_to(last))
}
