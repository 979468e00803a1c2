//! Clique formulas, read-once branching programs and regular resolution.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line tool and the experiment harness live in the `resclique` crate.

#![no_std]

extern crate alloc;

pub mod assignment;
pub mod bottleneck;
pub mod cnf;
pub mod construct;
pub mod denseness;
pub mod error;
pub mod graph;
pub mod proof;
pub mod robp;
pub mod set;
pub mod solvers;

pub use error::{Error, Result};
pub use set::VertexSet;
