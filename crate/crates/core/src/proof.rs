//! Resolution proofs: verification and restriction.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::assignment::Assignment;
use crate::cnf::{Clause, CnfFormula, Var};
use crate::error::{Error, Result};
use crate::set::VertexSet;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rule {
    Axiom,
    /// Resolve step `pos` (containing `var`) with step `neg` (containing `¬var`).
    Resolve { pos: usize, neg: usize, var: Var },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Step {
    pub clause: Clause,
    pub rule: Rule,
}

/// A sequence of clauses, each an axiom or the resolvent of two earlier ones.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ResolutionProof {
    steps: Vec<Step>,
}

impl ResolutionProof {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_steps(steps: Vec<Step>) -> Self {
        ResolutionProof { steps }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push_axiom(&mut self, clause: Clause) -> usize {
        self.steps.push(Step { clause, rule: Rule::Axiom });
        self.steps.len() - 1
    }

    pub fn push_resolvent(&mut self, pos: usize, neg: usize, var: Var) -> Result<usize> {
        let clause = self.steps[pos].clause.resolve(&self.steps[neg].clause, var)?;
        self.steps.push(Step { clause, rule: Rule::Resolve { pos, neg, var } });
        Ok(self.steps.len() - 1)
    }

    /// Keeps only the steps `last` depends on, with `last` as the final step.
    pub fn pruned_to(&self, last: usize) -> ResolutionProof {
        let mut needed = vec![false; last + 1];
        needed[last] = true;
        for i in (0..=last).rev() {
            if needed[i] {
                if let Rule::Resolve { pos, neg, .. } = self.steps[i].rule {
                    needed[pos] = true;
                    needed[neg] = true;
                }
            }
        }
        let mut new_index = vec![usize::MAX; last + 1];
        let mut out = Vec::new();
        for i in 0..=last {
            if !needed[i] {
                continue;
            }
            let rule = match self.steps[i].rule {
                Rule::Axiom => Rule::Axiom,
                Rule::Resolve { pos, neg, var } => Rule::Resolve { pos: new_index[pos], neg: new_index[neg], var },
            };
            new_index[i] = out.len();
            out.push(Step { clause: self.steps[i].clause.clone(), rule });
        }
        ResolutionProof { steps: out }
    }

    fn max_var(&self) -> usize {
        self.steps
            .iter()
            .flat_map(|s| s.clause.lits().iter().map(|l| l.var().index()))
            .chain(self.steps.iter().filter_map(|s| match s.rule {
                Rule::Resolve { var, .. } => Some(var.index()),
                Rule::Axiom => None,
            }))
            .max()
            .unwrap_or(0)
    }
}

fn reject(step: usize, reason: alloc::string::String) -> Error {
    Error::InvalidProof { step, reason }
}

/// Checks that `pi` derives the empty clause from `f`, and optionally that it is regular.
pub fn verify_refutation(pi: &ResolutionProof, f: &CnfFormula, require_regular: bool) -> Result<()> {
    let steps = pi.steps();
    if steps.is_empty() {
        return Err(reject(0, "empty proof".into()));
    }
    for (i, s) in steps.iter().enumerate() {
        match s.rule {
            Rule::Axiom => {
                if !f.contains(&s.clause) {
                    return Err(reject(i, format!("{:?} is not an axiom", s.clause)));
                }
            }
            Rule::Resolve { pos, neg, var } => {
                if pos >= i || neg >= i {
                    return Err(reject(i, "antecedent does not precede the step".into()));
                }
                let r = steps[pos]
                    .clause
                    .resolve(&steps[neg].clause, var)
                    .map_err(|_| reject(i, format!("antecedents do not clash on {}", var.index())))?;
                if r != s.clause {
                    return Err(reject(i, format!("expected resolvent {r:?}, found {:?}", s.clause)));
                }
            }
        }
    }
    if !steps[steps.len() - 1].clause.is_empty() {
        return Err(reject(steps.len() - 1, "last clause is not empty".into()));
    }
    if require_regular {
        if let Some(i) = regularity_violation(pi) {
            return Err(reject(i, "variable resolved twice on a path".into()));
        }
    }
    Ok(())
}

/// First step that resolves a variable already resolved above it, if any.
pub fn regularity_violation(pi: &ResolutionProof) -> Option<usize> {
    let cap = pi.max_var() + 1;
    let mut resolved: Vec<VertexSet> = Vec::with_capacity(pi.len());
    for (i, s) in pi.steps().iter().enumerate() {
        let mut set = VertexSet::new(cap);
        if let Rule::Resolve { pos, neg, var } = s.rule {
            set.union_with(&resolved[pos]);
            set.union_with(&resolved[neg]);
            if set.contains(var.index()) {
                return Some(i);
            }
            set.insert(var.index());
        }
        resolved.push(set);
    }
    None
}

pub fn is_regular(pi: &ResolutionProof) -> bool {
    regularity_violation(pi).is_none()
}

/// Refutation of `F|ρ` from a refutation of `F`. It is never longer than
/// `pi` and stays regular if `pi` is.
pub fn restrict_proof(pi: &ResolutionProof, rho: &Assignment) -> Result<ResolutionProof> {
    let mut out = ResolutionProof::new();
    let mut axioms: BTreeMap<Clause, usize> = BTreeMap::new();
    // rep[i]: index in `out` of a clause contained in C_i|ρ, or None if ρ satisfies C_i.
    let mut rep: Vec<Option<usize>> = Vec::with_capacity(pi.len());
    for s in pi.steps() {
        let r = match s.rule {
            Rule::Axiom => s.clause.restrict(rho).map(|c| *axioms.entry(c.clone()).or_insert_with(|| out.push_axiom(c))),
            Rule::Resolve { pos, neg, var } => match rho.get(var) {
                Some(true) => rep[neg],
                Some(false) => rep[pos],
                None => match (rep[pos], rep[neg]) {
                    (Some(p), Some(q)) => {
                        if !out.steps[p].clause.contains(var.pos()) {
                            Some(p)
                        } else if !out.steps[q].clause.contains(var.neg()) {
                            Some(q)
                        } else {
                            Some(out.push_resolvent(p, q, var)?)
                        }
                    }
                    _ => None,
                },
            },
        };
        rep.push(r);
    }
    match rep.last() {
        Some(Some(last)) => Ok(out.pruned_to(*last)),
        _ => Err(Error::InvalidProof { step: pi.len(), reason: "final clause satisfied by restriction".into() }),
    }
}

/// Renames every variable of `pi`.
pub fn rename_proof<F: FnMut(Var) -> Var>(pi: &ResolutionProof, mut f: F) -> Result<ResolutionProof> {
    let steps = pi
        .steps()
        .iter()
        .map(|s| {
            let clause = s.clause.map_vars(&mut f)?;
            let rule = match s.rule {
                Rule::Axiom => Rule::Axiom,
                Rule::Resolve { pos, neg, var } => Rule::Resolve { pos, neg, var: f(var) },
            };
            Ok(Step { clause, rule })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResolutionProof { steps })
}
