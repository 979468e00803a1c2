use alloc::vec::Vec;

use crate::cnf::{Clause, Lit, Var};
use crate::error::{Error, Result};
use crate::set::VertexSet;

/// A partial assignment to variables `1..=num_vars`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Assignment {
    ones: VertexSet,
    zeros: VertexSet,
}

impl Assignment {
    pub fn new(num_vars: usize) -> Self {
        Assignment { ones: VertexSet::new(num_vars + 1), zeros: VertexSet::new(num_vars + 1) }
    }

    pub fn num_vars(&self) -> usize {
        self.ones.capacity() - 1
    }

    pub fn get(&self, x: Var) -> Option<bool> {
        let i = x.index();
        if i >= self.ones.capacity() {
            None
        } else if self.ones.contains(i) {
            Some(true)
        } else if self.zeros.contains(i) {
            Some(false)
        } else {
            None
        }
    }

    /// Assigns `x`; fails if `x` is out of range or already set to the other value.
    pub fn set(&mut self, x: Var, value: bool) -> Result<()> {
        let i = x.index();
        if i == 0 || i > self.num_vars() {
            return Err(Error::InvalidParameter(alloc::format!("variable {i} out of range")));
        }
        match self.get(x) {
            Some(v) if v != value => {
                Err(Error::InvalidParameter(alloc::format!("variable {i} assigned twice")))
            }
            _ => {
                if value {
                    self.ones.insert(i);
                } else {
                    self.zeros.insert(i);
                }
                Ok(())
            }
        }
    }

    pub fn with(&self, x: Var, value: bool) -> Result<Self> {
        let mut a = self.clone();
        a.set(x, value)?;
        Ok(a)
    }

    pub fn is_assigned(&self, x: Var) -> bool {
        self.get(x).is_some()
    }

    pub fn len(&self) -> usize {
        self.ones.len() + self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Variables set to 1, as raw indices.
    pub fn ones(&self) -> &VertexSet {
        &self.ones
    }

    /// Variables set to 0, as raw indices.
    pub fn zeros(&self) -> &VertexSet {
        &self.zeros
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        let ones = self.ones.iter().map(|i| (Var::new(i as u32), true));
        let zeros = self.zeros.iter().map(|i| (Var::new(i as u32), false));
        let mut all: Vec<_> = ones.chain(zeros).collect();
        all.sort_unstable();
        all.into_iter()
    }

    /// Pairs on which both assignments agree.
    pub fn meet(&self, other: &Assignment) -> Assignment {
        Assignment { ones: self.ones.intersection(&other.ones), zeros: self.zeros.intersection(&other.zeros) }
    }

    pub fn lit_value(&self, l: Lit) -> Option<bool> {
        self.get(l.var()).map(|v| v == l.is_positive())
    }

    pub fn satisfies(&self, c: &Clause) -> bool {
        c.lits().iter().any(|&l| self.lit_value(l) == Some(true))
    }

    pub fn falsifies(&self, c: &Clause) -> bool {
        c.lits().iter().all(|&l| self.lit_value(l) == Some(false))
    }

    /// Is every pair of `self` also in `other`?
    pub fn is_sub_assignment_of(&self, other: &Assignment) -> bool {
        self.ones.is_subset(&other.ones) && self.zeros.is_subset(&other.zeros)
    }
}
