//! Reproducible randomness and the replicated-experiment harness.

mod harness;
mod rng;

pub use harness::{run_replicates, Channel, Harness, StudyResult};
pub use rng::{make_stream, Distribution, RngStream};
