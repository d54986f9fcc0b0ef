//! Random-walk Metropolis–Hastings for `f(y) = c (1 + |y|)³ exp(-y⁴)`.
//!
//! The normal proposal is symmetric, so the acceptance probability reduces
//! to `min{1, g(y) / g(x)}` with `g` the unnormalized density. The ratio is
//! evaluated in log space because `g` underflows for `|y|` beyond about 7.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{integrate_interval, Integrator, QuadratureResult, Symmetry};
use crate::simkit::{make_stream, RngStream};

pub const EXPERIMENT_ID: &str = "mh";

/// The target density with its normalizing constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TargetDensity {
    /// `c = 1 / ∫ g`.
    normalizing_constant: f64,
    mass: QuadratureResult,
}

impl TargetDensity {
    /// `g(y) = (1 + |y|)³ exp(-y⁴)`.
    pub fn unnormalized(y: f64) -> f64 {
        (1.0 + y.abs()).powi(3) * (-y.powi(4)).exp()
    }

    pub fn log_unnormalized(y: f64) -> f64 {
        3.0 * y.abs().ln_1p() - y.powi(4)
    }

    /// Integrate `g` over the real line (even-symmetry shortcut) at relative
    /// tolerance `tol` and cache `c = 1 / ∫ g`.
    pub fn normalize(tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
        }
        let mass = Integrator::with_rel_tol(tol).real_line(Self::unnormalized, Symmetry::Even)?;
        Ok(TargetDensity {
            normalizing_constant: 1.0 / mass.value,
            mass,
        })
    }

    pub fn normalizing_constant(&self) -> f64 {
        self.normalizing_constant
    }

    /// `∫ g` and its quadrature diagnostics.
    pub fn mass(&self) -> QuadratureResult {
        self.mass
    }

    pub fn pdf(&self, y: f64) -> f64 {
        self.normalizing_constant * Self::unnormalized(y)
    }

    /// Probability mass on `[a, b]`.
    pub fn probability(&self, a: f64, b: f64) -> Result<f64> {
        Ok(integrate_interval(|y| self.pdf(y), a, b, 1e-12)?.value)
    }

    /// `E[Y²]`; equals the variance since the density is even.
    pub fn second_moment(&self, tol: f64) -> Result<f64> {
        let r = Integrator::with_rel_tol(tol).real_line(|y| y * y * self.pdf(y), Symmetry::Even)?;
        Ok(r.value)
    }
}

/// `1 / ∫ g`, computed at relative tolerance `tol`.
pub fn normalize(tol: f64) -> Result<f64> {
    Ok(TargetDensity::normalize(tol)?.normalizing_constant())
}

/// `ln α(x, y) = min{0, ln g(y) - ln g(x)}`.
pub fn log_acceptance_prob(x: f64, y: f64) -> f64 {
    if x == y {
        return 0.0;
    }
    (TargetDensity::log_unnormalized(y) - TargetDensity::log_unnormalized(x)).min(0.0)
}

/// `α(x, y) = min{1, exp(x⁴ - y⁴) (1 + |y|)³ / (1 + |x|)³}`.
pub fn acceptance_prob(x: f64, y: f64) -> f64 {
    log_acceptance_prob(x, y).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct MhConfig {
    pub proposal_sd: f64,
    pub burn_in: u64,
    pub n_samples: u64,
    pub initial_x: f64,
}

impl Default for MhConfig {
    fn default() -> Self {
        MhConfig {
            proposal_sd: 1.0,
            burn_in: 100_000,
            n_samples: 100_000,
            initial_x: 3.0,
        }
    }
}

impl MhConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.proposal_sd > 0.0) || !self.proposal_sd.is_finite() {
            return Err(Error::domain(format!("proposal sd must be positive, got {}", self.proposal_sd)));
        }
        if self.n_samples < 1 {
            return Err(Error::domain("n_samples must be at least 1"));
        }
        if !self.initial_x.is_finite() {
            return Err(Error::domain("initial state must be finite"));
        }
        Ok(())
    }

    /// The chain is shorter than the default burn-in or sample count.
    pub fn below_defaults(&self) -> bool {
        let d = MhConfig::default();
        self.burn_in < d.burn_in || self.n_samples < d.n_samples
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub next: f64,
    pub accepted: bool,
}

/// One transition from `x`: propose `y ~ N(x, sd)`, accept when
/// `ln u < ln α(x, y)`. Consumes exactly two stream values.
pub fn mh_step(x: f64, proposal_sd: f64, stream: &mut RngStream) -> Step {
    let y = stream.normal(x, proposal_sd);
    let u = stream.uniform01();
    if u.ln() < log_acceptance_prob(x, y) {
        Step { next: y, accepted: true }
    } else {
        Step { next: x, accepted: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainResult {
    pub samples: Vec<f64>,
    /// Accepted / proposed over the collection phase.
    pub acceptance_rate: f64,
    pub config: MhConfig,
    pub root_seed: u64,
}

/// Burn in for `config.burn_in` steps, then record `config.n_samples`
/// consecutive states. No thinning.
pub fn run_chain(config: &MhConfig, root_seed: u64) -> Result<ChainResult> {
    run_chain_indexed(config, root_seed, 0)
}

/// As [`run_chain`] on replicate stream `chain_index`, for running several
/// independent chains.
pub fn run_chain_indexed(config: &MhConfig, root_seed: u64, chain_index: u64) -> Result<ChainResult> {
    config.validate()?;
    let mut stream = make_stream(root_seed, EXPERIMENT_ID, chain_index);
    let mut x = config.initial_x;
    for _ in 0..config.burn_in {
        x = mh_step(x, config.proposal_sd, &mut stream).next;
    }
    let mut accepted = 0u64;
    let samples: Vec<f64> = (0..config.n_samples)
        .map(|_| {
            let step = mh_step(x, config.proposal_sd, &mut stream);
            accepted += u64::from(step.accepted);
            x = step.next;
            x
        })
        .collect();
    Ok(ChainResult {
        acceptance_rate: accepted as f64 / config.n_samples as f64,
        samples,
        config: *config,
        root_seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainSummary {
    pub mean: f64,
    /// Divisor `n - 1`.
    pub variance: f64,
    pub positive_fraction: f64,
}

impl ChainResult {
    pub fn summary(&self) -> ChainSummary {
        let (mean, sd) = crate::numerics::mean_sd(&self.samples);
        let positive = self.samples.iter().filter(|&&x| x > 0.0).count();
        ChainSummary {
            mean,
            variance: sd * sd,
            positive_fraction: positive as f64 / self.samples.len() as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    /// Fraction of all samples in the bin divided by its width.
    pub empirical: f64,
    /// Mean of the true density over the bin.
    pub expected: f64,
}

/// Histogram of `samples` on `bins` equal bins over `range` against the
/// bin-averaged true density. Samples outside `range` count towards the
/// total but land in no bin.
pub fn density_histogram(
    samples: &[f64],
    density: &TargetDensity,
    bins: usize,
    range: (f64, f64),
) -> Result<Vec<HistogramBin>> {
    if samples.is_empty() {
        return Err(Error::domain("no samples"));
    }
    if bins < 5 {
        return Err(Error::domain(format!("at least 5 bins required, got {bins}")));
    }
    let (lo, hi) = range;
    if !(lo < hi) {
        return Err(Error::domain(format!("empty range [{lo}, {hi}]")));
    }
    let covered = density.probability(lo, hi)?;
    if covered < 0.999 {
        return Err(Error::domain(format!(
            "range [{lo}, {hi}] holds only {covered:.5} of the target mass"
        )));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &s in samples {
        if s >= lo && s <= hi {
            let j = (((s - lo) / width) as usize).min(bins - 1);
            counts[j] += 1;
        }
    }
    let n = samples.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let a = lo + width * j as f64;
            let b = if j + 1 == bins { hi } else { lo + width * (j + 1) as f64 };
            Ok(HistogramBin {
                lo: a,
                hi: b,
                empirical: c as f64 / (n * width),
                expected: density.probability(a, b)? / width,
            })
        })
        .collect()
}

/// Largest absolute gap between the sample histogram and the bin-averaged
/// true density.
pub fn density_distance(samples: &[f64], density: &TargetDensity, bins: usize, range: (f64, f64)) -> Result<f64> {
    let hist = density_histogram(samples, density, bins, range)?;
    Ok(hist.iter().map(|b| (b.empirical - b.expected).abs()).fold(0.0, f64::max))
}
