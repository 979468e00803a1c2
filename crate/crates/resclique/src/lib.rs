//! File formats, experiment harness and command line tool on top of `resclique-core`.

pub mod cli;
pub mod experiment;
pub mod formats;

pub use resclique_core as core;
