//! CNF formulas and the three k-clique encodings.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};

/// A propositional variable, numbered from 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var(u32);

impl Var {
    pub fn new(index: u32) -> Self {
        debug_assert!(index > 0, "variables are 1-based");
        Var(index)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn pos(self) -> Lit {
        Lit { var: self, negated: false }
    }

    pub fn neg(self) -> Lit {
        Lit { var: self, negated: true }
    }
}

/// A literal. Literals order by variable first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Lit {
    var: Var,
    negated: bool,
}

impl Lit {
    pub fn from_dimacs(x: i32) -> Result<Lit> {
        if x == 0 {
            return Err(Error::InvalidClause("literal 0".into()));
        }
        let var = Var::new(x.unsigned_abs());
        Ok(if x > 0 { var.pos() } else { var.neg() })
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var.0 as i32;
        if self.negated {
            -v
        } else {
            v
        }
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_positive(self) -> bool {
        !self.negated
    }

    pub fn negate(self) -> Lit {
        Lit { var: self.var, negated: !self.negated }
    }
}

/// A non-tautological clause kept sorted by variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Clause(Vec<Lit>);

impl Clause {
    pub fn empty() -> Self {
        Clause(Vec::new())
    }

    pub fn new<I: IntoIterator<Item = Lit>>(lits: I) -> Result<Self> {
        let mut v: Vec<Lit> = lits.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.windows(2).any(|w| w[0].var == w[1].var) {
            return Err(Error::InvalidClause("tautology".into()));
        }
        Ok(Clause(v))
    }

    pub fn from_dimacs(lits: &[i32]) -> Result<Self> {
        Self::new(lits.iter().map(|&x| Lit::from_dimacs(x)).collect::<Result<Vec<_>>>()?)
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, l: Lit) -> bool {
        self.0.binary_search(&l).is_ok()
    }

    /// Resolvent on `x`. Requires `x` in `self` and `¬x` in `other`.
    pub fn resolve(&self, other: &Clause, x: Var) -> Result<Clause> {
        if !self.contains(x.pos()) || !other.contains(x.neg()) {
            return Err(Error::InvalidClause(format!("cannot resolve on {}", x.0)));
        }
        Clause::new(self.0.iter().chain(other.0.iter()).copied().filter(|l| l.var != x))
    }

    pub fn is_subset(&self, other: &Clause) -> bool {
        self.0.iter().all(|&l| other.contains(l))
    }

    pub fn without_var(&self, x: Var) -> Clause {
        Clause(self.0.iter().copied().filter(|l| l.var != x).collect())
    }

    /// Clause under a partial assignment: `None` if satisfied, otherwise the
    /// clause with its falsified literals removed.
    pub fn restrict(&self, rho: &Assignment) -> Option<Clause> {
        if rho.satisfies(self) {
            return None;
        }
        Some(Clause(self.0.iter().copied().filter(|&l| rho.lit_value(l).is_none()).collect()))
    }

    pub fn map_vars<F: FnMut(Var) -> Var>(&self, mut f: F) -> Result<Clause> {
        Clause::new(self.0.iter().map(|l| Lit { var: f(l.var), negated: l.negated }))
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter().map(|l| l.to_dimacs())).finish()
    }
}

/// Which axiom family a clause belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum AxiomKind {
    Edge,
    /// Clique axiom for position (map encodings) or block (block encoding) `i`, 0-based.
    Clique(usize),
    Functionality,
    Other,
}

/// How variable numbers relate to graph vertices.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VarMap {
    /// `x_{v,i}` is variable `v*k + i + 1`.
    Map { n: usize, k: usize },
    /// `x_v` is variable `v + 1`.
    Block { n: usize },
    Plain,
}

impl VarMap {
    pub fn map_var(n: usize, k: usize, v: usize, i: usize) -> Var {
        debug_assert!(v < n && i < k);
        Var::new((v * k + i + 1) as u32)
    }

    pub fn block_var(v: usize) -> Var {
        Var::new((v + 1) as u32)
    }

    /// `(v, Some(i))` for map variables, `(v, None)` for block variables.
    pub fn decode(&self, x: Var) -> Option<(usize, Option<usize>)> {
        let j = x.index().checked_sub(1)?;
        match *self {
            VarMap::Map { n, k } if j < n * k => Some((j / k, Some(j % k))),
            VarMap::Block { n } if j < n => Some((j, None)),
            _ => None,
        }
    }
}

/// A CNF formula over variables `1..=num_vars`, as a duplicate-free clause list.
#[derive(Clone, Debug)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
    kinds: Vec<AxiomKind>,
    var_map: VarMap,
    index: BTreeMap<Clause, usize>,
}

impl CnfFormula {
    /// Builds a formula; later duplicates of a clause are dropped.
    pub fn new<I>(num_vars: usize, clauses: I, var_map: VarMap) -> Result<Self>
    where
        I: IntoIterator<Item = (Clause, AxiomKind)>,
    {
        let mut f = CnfFormula { num_vars, clauses: Vec::new(), kinds: Vec::new(), var_map, index: BTreeMap::new() };
        for (c, kind) in clauses {
            if let Some(l) = c.lits().iter().find(|l| l.var.index() > num_vars) {
                return Err(Error::InvalidClause(format!("variable {} exceeds {num_vars}", l.var.0)));
            }
            f.push(c, kind);
        }
        Ok(f)
    }

    fn push(&mut self, c: Clause, kind: AxiomKind) {
        if !self.index.contains_key(&c) {
            self.index.insert(c.clone(), self.clauses.len());
            self.clauses.push(c);
            self.kinds.push(kind);
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, i: usize) -> &Clause {
        &self.clauses[i]
    }

    pub fn kind(&self, i: usize) -> AxiomKind {
        self.kinds[i]
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn var_map(&self) -> VarMap {
        self.var_map
    }

    pub fn find(&self, c: &Clause) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn contains(&self, c: &Clause) -> bool {
        self.index.contains_key(c)
    }

    /// Index of an axiom the caller knows to be present.
    pub(crate) fn expect(&self, c: &Clause) -> Result<usize> {
        self.find(c).ok_or_else(|| Error::Internal(format!("clause {c:?} missing from formula")))
    }

    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        self.clauses.iter().all(|c| a.satisfies(c))
    }
}

fn binary(a: Var, b: Var) -> Clause {
    Clause::new([a.neg(), b.neg()]).expect("distinct variables")
}

/// `Clique(G, k)`; with `functionality = false` this is the weak encoding.
pub fn encode_clique(g: &Graph, k: usize, functionality: bool) -> Result<CnfFormula> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    let n = g.n();
    let x = |v, i| VarMap::map_var(n, k, v, i);
    let mut out = Vec::new();
    for u in 0..n {
        for v in u..n {
            if u != v && g.has_edge(u, v) {
                continue;
            }
            for i in 0..k {
                for j in 0..k {
                    if i != j && (u != v || i < j) {
                        out.push((binary(x(u, i), x(v, j)), AxiomKind::Edge));
                    }
                }
            }
        }
    }
    for i in 0..k {
        let c = Clause::new((0..n).map(|v| x(v, i).pos()))?;
        out.push((c, AxiomKind::Clique(i)));
    }
    if functionality {
        for i in 0..k {
            for u in 0..n {
                for v in u + 1..n {
                    out.push((binary(x(u, i), x(v, i)), AxiomKind::Functionality));
                }
            }
        }
    }
    CnfFormula::new(n * k, out, VarMap::Map { n, k })
}

pub fn encode_weak(g: &Graph, k: usize) -> Result<CnfFormula> {
    encode_clique(g, k, false)
}

/// `Clique_block(G, part)`. A pair inside one block yields a single clause,
/// tagged `Functionality` whether or not it is an edge.
pub fn encode_clique_block(g: &Graph, part: &Partition) -> Result<CnfFormula> {
    let n = g.n();
    if part.n() != n {
        return Err(Error::InvalidPartition(format!("partition of {} vertices for graph on {n}", part.n())));
    }
    let x = VarMap::block_var;
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if !g.has_edge(u, v) && part.block_of(u) != part.block_of(v) {
                out.push((binary(x(u), x(v)), AxiomKind::Edge));
            }
        }
    }
    for i in 0..part.k() {
        let c = Clause::new(part.block(i).iter().map(|&v| x(v).pos()))?;
        out.push((c, AxiomKind::Clique(i)));
    }
    for i in 0..part.k() {
        let b = part.block(i);
        for (a, &u) in b.iter().enumerate() {
            for &v in &b[a + 1..] {
                out.push((binary(x(u), x(v)), AxiomKind::Functionality));
            }
        }
    }
    CnfFormula::new(n, out, VarMap::Block { n })
}

/// `F|ρ`: satisfied clauses vanish, falsified literals are dropped.
pub fn restrict(f: &CnfFormula, rho: &Assignment) -> CnfFormula {
    let kept = f
        .clauses
        .iter()
        .zip(&f.kinds)
        .filter_map(|(c, &kind)| c.restrict(rho).map(|c| (c, kind)));
    CnfFormula::new(f.num_vars, kept, f.var_map).expect("restriction keeps variables in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::balanced_partition;

    fn count(f: &CnfFormula, kind: fn(AxiomKind) -> bool) -> usize {
        (0..f.len()).filter(|&i| kind(f.kind(i))).count()
    }

    #[test]
    fn clause_normalisation() {
        let c = Clause::from_dimacs(&[3, -1, 3]).unwrap();
        assert_eq!(c.lits().iter().map(|l| l.to_dimacs()).collect::<Vec<_>>(), [-1, 3]);
        assert!(Clause::from_dimacs(&[2, -2]).is_err());
        let d = Clause::from_dimacs(&[-3, 4]).unwrap();
        assert_eq!(c.resolve(&d, Var::new(3)).unwrap(), Clause::from_dimacs(&[-1, 4]).unwrap());
        assert!(d.resolve(&c, Var::new(3)).is_err());
    }

    #[test]
    fn map_encoding_counts() {
        // Path 0-1-2, k = 2.
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let f = encode_clique(&g, 2, true).unwrap();
        assert_eq!(f.num_vars(), 6);
        // Non-adjacent pairs incl. u = v: (0,0),(1,1),(2,2),(0,2); (0,2) gives 2 clauses.
        assert_eq!(count(&f, |k| k == AxiomKind::Edge), 5);
        assert_eq!(count(&f, |k| matches!(k, AxiomKind::Clique(_))), 2);
        assert_eq!(count(&f, |k| k == AxiomKind::Functionality), 6);
        let w = encode_weak(&g, 2).unwrap();
        assert_eq!(w.len(), 7);
    }

    #[test]
    fn block_encoding_counts() {
        // K4 minus {1,2}, blocks {0,1} and {2,3}.
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)]).unwrap();
        let part = balanced_partition(4, 2).unwrap();
        let f = encode_clique_block(&g, &part).unwrap();
        assert_eq!(count(&f, |k| k == AxiomKind::Edge), 1);
        assert_eq!(count(&f, |k| matches!(k, AxiomKind::Clique(_))), 2);
        assert_eq!(count(&f, |k| k == AxiomKind::Functionality), 2);
        // A same-block non-edge gives one clause.
        let h = Graph::from_edges(4, [(0, 2), (1, 3)]).unwrap();
        let f = encode_clique_block(&h, &part).unwrap();
        assert_eq!(count(&f, |k| k == AxiomKind::Edge), 2);
        assert_eq!(count(&f, |k| k == AxiomKind::Functionality), 2);
        assert_eq!(f.len(), 6);
    }

    #[test]
    fn k3_map_counts() {
        let f = encode_clique(&Graph::complete(3), 3, true).unwrap();
        assert_eq!(f.num_vars(), 9);
        assert_eq!(count(&f, |k| k == AxiomKind::Edge), 9);
        assert_eq!(count(&f, |k| matches!(k, AxiomKind::Clique(_))), 3);
        assert_eq!(count(&f, |k| k == AxiomKind::Functionality), 9);
    }

    #[test]
    fn restriction() {
        let g = Graph::complete(3);
        let f = encode_clique(&g, 2, true).unwrap();
        let mut rho = Assignment::new(f.num_vars());
        rho.set(VarMap::map_var(3, 2, 0, 0), true).unwrap();
        rho.set(VarMap::map_var(3, 2, 1, 1), false).unwrap();
        let r = restrict(&f, &rho);
        assert!(r.len() < f.len());
        for c in r.clauses() {
            assert!(c.lits().iter().all(|&l| rho.lit_value(l).is_none()));
        }
    }

    #[test]
    fn decode_vars() {
        let m = VarMap::Map { n: 5, k: 3 };
        assert_eq!(m.decode(VarMap::map_var(5, 3, 4, 2)), Some((4, Some(2))));
        assert_eq!(m.decode(Var::new(16)), None);
        assert_eq!(VarMap::Block { n: 3 }.decode(Var::new(3)), Some((2, None)));
    }
}
