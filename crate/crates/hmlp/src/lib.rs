//! Configuration, CSV output and parallel sweeps around `hmlp-core`.

pub mod config;
pub mod inputs;
pub mod report;
pub mod run;

pub use hmlp_core as core;
