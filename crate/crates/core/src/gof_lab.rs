//! Null distribution of Pearson's statistic for uniform data in equal bins,
//! compared against the χ² reference with `bins - 1` degrees of freedom.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_interval, mean_sd};
use crate::simkit::Harness;

pub const EXPERIMENT_ID: &str = "gof";

/// Comparison window for [`shape_distance`]: 40 equal bins on `[0, 20]`.
pub const COMPARISON_BINS: usize = 40;
pub const COMPARISON_RANGE: (f64, f64) = (0.0, 20.0);

/// `Σ (O - E)² / E`.
pub fn pearson_statistic(observed: &[u64], expected: &[f64]) -> Result<f64> {
    if observed.len() != expected.len() {
        return Err(Error::domain(format!(
            "{} observed cells but {} expected",
            observed.len(),
            expected.len()
        )));
    }
    if observed.is_empty() {
        return Err(Error::domain("no cells"));
    }
    if let Some(e) = expected.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::domain(format!("expected counts must be positive, got {e}")));
    }
    let obs_total: f64 = observed.iter().map(|&o| o as f64).sum();
    let exp_total: f64 = expected.iter().sum();
    if (obs_total - exp_total).abs() > 1e-9 * exp_total.max(1.0) {
        return Err(Error::domain(format!(
            "observed total {obs_total} differs from expected total {exp_total}"
        )));
    }
    Ok(observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum())
}

/// Count draws on `(0, bins]` into unit bins `(j - 1, j]`; a draw `u` lands
/// in bin `⌈u⌉` (one-based).
pub fn bin_uniform(draws: &[f64], bins: usize) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; bins];
    for &u in draws {
        if !(u > 0.0 && u <= bins as f64) {
            return Err(Error::domain(format!("draw {u} outside (0, {bins}]")));
        }
        counts[u.ceil() as usize - 1] += 1;
    }
    Ok(counts)
}

/// χ² density `x^{k/2-1} e^{-x/2} / (2^{k/2} Γ(k/2))`, evaluated in log space.
pub fn chisq_density(x: f64, df: u32) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("χ² density needs x >= 0, got {x}")));
    }
    if df == 0 {
        return Err(Error::domain("degrees of freedom must be at least 1"));
    }
    let half = f64::from(df) / 2.0;
    if x == 0.0 {
        return Ok(match df {
            1 => f64::INFINITY,
            2 => 0.5,
            _ => 0.0,
        });
    }
    let log = (half - 1.0) * x.ln() - x / 2.0 - half * std::f64::consts::LN_2 - libm::lgamma(half);
    Ok(log.exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityBin {
    pub lo: f64,
    pub hi: f64,
    pub empirical: f64,
    pub reference: f64,
}

/// Histogram of `statistics` on the comparison bins against the bin-averaged
/// χ²_df density. Bins are `[lo, hi)`; values beyond the window count
/// towards the total only.
pub fn overlay(statistics: &[f64], df: u32, bins: usize, range: (f64, f64)) -> Result<Vec<DensityBin>> {
    if statistics.is_empty() {
        return Err(Error::domain("no statistics"));
    }
    if bins == 0 || !(range.0 < range.1) || range.0 < 0.0 {
        return Err(Error::domain("comparison bins need a non-empty range in [0, ∞)"));
    }
    let width = (range.1 - range.0) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &t in statistics {
        if t >= range.0 && t < range.1 {
            let j = (((t - range.0) / width) as usize).min(bins - 1);
            counts[j] += 1;
        }
    }
    let n = statistics.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let lo = range.0 + width * j as f64;
            let hi = range.0 + width * (j + 1) as f64;
            let mass = integrate_interval(|x| chisq_density(x, df).unwrap_or(0.0), lo, hi, 1e-12)?.value;
            Ok(DensityBin {
                lo,
                hi,
                empirical: c as f64 / (n * width),
                reference: mass / width,
            })
        })
        .collect()
}

/// Sup over comparison bins of |empirical density − bin-averaged χ²_df density|.
pub fn shape_distance(statistics: &[f64], df: u32, bins: usize, range: (f64, f64)) -> Result<f64> {
    Ok(overlay(statistics, df, bins, range)?
        .iter()
        .map(|b| (b.empirical - b.reference).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GofPlan {
    pub bins: usize,
    pub sample_sizes: Vec<usize>,
    pub n_reps: u64,
}

impl Default for GofPlan {
    fn default() -> Self {
        GofPlan {
            bins: 8,
            sample_sizes: vec![16, 64],
            n_reps: 10_000,
        }
    }
}

impl GofPlan {
    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(Error::domain("at least two bins required"));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::domain("no sample sizes"));
        }
        for &n in &self.sample_sizes {
            if n < self.bins || n % self.bins != 0 {
                return Err(Error::domain(format!(
                    "sample size {n} must be a positive multiple of {} bins",
                    self.bins
                )));
            }
        }
        if self.n_reps < 1 {
            return Err(Error::domain("n_reps must be at least 1"));
        }
        Ok(())
    }

    pub fn df(&self) -> u32 {
        (self.bins - 1) as u32
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofScenario {
    pub n: usize,
    pub expected_count: f64,
    pub statistics: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    /// Monte Carlo standard error of `mean`.
    pub mean_se: f64,
    pub shape_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GofResult {
    pub plan: GofPlan,
    pub root_seed: u64,
    pub df: u32,
    pub scenarios: Vec<GofScenario>,
}

impl GofResult {
    pub fn scenario(&self, n: usize) -> Option<&GofScenario> {
        self.scenarios.iter().find(|s| s.n == n)
    }
}

pub fn simulate_uniform_gof(plan: &GofPlan, root_seed: u64) -> Result<GofResult> {
    simulate_uniform_gof_with(&Harness::new(), plan, root_seed)
}

pub fn simulate_uniform_gof_with(harness: &Harness, plan: &GofPlan, root_seed: u64) -> Result<GofResult> {
    plan.validate()?;
    let df = plan.df();
    let bins = plan.bins;
    let scenarios = plan
        .sample_sizes
        .iter()
        .map(|&n| {
            let expected = vec![n as f64 / bins as f64; bins];
            let id = format!("{EXPERIMENT_ID}/b{bins}/n{n}");
            let study = harness.run_replicates(plan.n_reps, &id, root_seed, &["statistic"], |_, stream| {
                let draws: Vec<f64> = (0..n).map(|_| stream.uniform(0.0, bins as f64)).collect();
                let counts = bin_uniform(&draws, bins)?;
                Ok::<_, Error>(vec![pearson_statistic(&counts, &expected)?])
            })?;
            let statistics = study.channels.into_iter().next().expect("one channel").values;
            let (mean, sd) = mean_sd(&statistics);
            let distance = shape_distance(&statistics, df, COMPARISON_BINS, COMPARISON_RANGE)?;
            Ok(GofScenario {
                n,
                expected_count: expected[0],
                mean,
                variance: sd * sd,
                mean_se: sd / (statistics.len() as f64).sqrt(),
                shape_distance: distance,
                statistics,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GofResult {
        plan: plan.clone(),
        root_seed,
        df,
        scenarios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_examples() {
        let e = [2.0; 8];
        assert_eq!(pearson_statistic(&[2; 8], &e).unwrap(), 0.0);
        assert_eq!(pearson_statistic(&[4, 0, 2, 2, 2, 2, 2, 2], &e).unwrap(), 4.0);
        assert_eq!(pearson_statistic(&[3, 1, 2, 2, 2, 2, 2, 2], &e).unwrap(), 1.0);
    }

    #[test]
    fn pearson_rejects_bad_input() {
        assert!(pearson_statistic(&[1, 1], &[2.0]).is_err());
        assert!(pearson_statistic(&[1, 1], &[2.0, 0.0]).is_err());
        assert!(pearson_statistic(&[1, 1], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn binning() {
        assert_eq!(bin_uniform(&[0.5, 1.5, 1.7], 2).unwrap(), vec![1, 2]);
        assert_eq!(bin_uniform(&[0.1, 0.9, 1.0], 3).unwrap(), vec![3, 0, 0]);
        // integer boundary goes to the lower bin
        assert_eq!(bin_uniform(&[2.0], 3).unwrap(), vec![0, 1, 0]);
        assert!(bin_uniform(&[0.0], 3).is_err());
        assert!(bin_uniform(&[3.5], 3).is_err());
    }

    #[test]
    fn chisq_density_values() {
        assert_eq!(chisq_density(0.0, 2).unwrap(), 0.5);
        assert!((chisq_density(3.0, 2).unwrap() - 0.5 * (-1.5f64).exp()).abs() < 1e-15);
        assert!(chisq_density(-1.0, 7).is_err());
        assert!(chisq_density(1.0, 0).is_err());
    }

    #[test]
    fn plan_validation() {
        assert!(GofPlan { sample_sizes: vec![12], ..Default::default() }.validate().is_err());
        assert!(GofPlan { bins: 1, ..Default::default() }.validate().is_err());
        assert!(GofPlan::default().validate().is_ok());
    }

    #[test]
    fn small_simulation_is_deterministic() {
        let plan = GofPlan {
            n_reps: 300,
            ..Default::default()
        };
        let a = simulate_uniform_gof(&plan, 1).unwrap();
        let b = simulate_uniform_gof_with(&Harness::with_workers(3), &plan, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.df, 7);
        assert!(a.scenarios.iter().all(|s| s.statistics.iter().all(|&t| t >= 0.0)));
    }
}
