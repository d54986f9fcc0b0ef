//! Paired analytic and simulation solutions to four statistical computing
//! problems: pooled blood testing, Metropolis–Hastings sampling of a
//! non-standard density, IQR-based scale estimation, and the small-sample
//! behavior of Pearson's chi-square statistic.
//!
//! Every random quantity is drawn from a keyed [`simkit::RngStream`], so a
//! root seed fixes all results regardless of thread count.

pub mod error;
pub mod estimator_lab;
pub mod gof_lab;
pub mod mh_sampler;
pub mod numerics;
pub mod pooled_testing;
pub mod report;
pub mod simkit;

pub use error::{Error, Result};
