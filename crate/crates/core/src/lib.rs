//! Structured quantum search for random k-SAT: instance generation, ensemble
//! statistics, a statevector simulator, mean-field models, GSAT baselines and
//! an experiment harness.

pub mod ensemble;
pub mod error;
pub mod gsat;
pub mod harness;
pub mod math;
pub mod meanfield;
pub mod nelder_mead;
pub mod optimizer;
pub mod rng;
pub mod sat;
pub mod schedule;
pub mod sim;

pub use error::{Error, Result};
