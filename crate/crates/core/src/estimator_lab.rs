//! Sampling distributions of two scale estimators for normal data: the
//! IQR-based `IQR / (2 z_0.75)` and the usual `n - 1` standard deviation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{mean_sd, quantile_sorted, summarize, SummaryStats};
use crate::simkit::Harness;

pub const EXPERIMENT_ID: &str = "estimator";

/// `2 Φ⁻¹(0.75)`, the IQR of a standard normal.
pub const NORMAL_IQR: f64 = 1.348_979_500_392_163_4;

/// IQR (type-7 quartiles) divided by [`NORMAL_IQR`].
pub fn sigma_hat_iqr(sample: &[f64]) -> Result<f64> {
    if sample.len() < 4 {
        return Err(Error::domain(format!("IQR estimator needs n >= 4, got {}", sample.len())));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    sigma_hat_iqr_sorted(&sorted)
}

fn sigma_hat_iqr_sorted(sorted: &[f64]) -> Result<f64> {
    let iqr = quantile_sorted(sorted, 0.75)? - quantile_sorted(sorted, 0.25)?;
    Ok(iqr / NORMAL_IQR)
}

/// Sample standard deviation, divisor `n - 1`.
pub fn sigma_hat_s(sample: &[f64]) -> Result<f64> {
    if sample.len() < 2 {
        return Err(Error::domain(format!("standard deviation needs n >= 2, got {}", sample.len())));
    }
    Ok(mean_sd(sample).1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorStudyPlan {
    pub sample_sizes: Vec<usize>,
    pub true_mean: f64,
    pub true_sd: f64,
    pub n_reps: u64,
}

impl Default for EstimatorStudyPlan {
    fn default() -> Self {
        EstimatorStudyPlan {
            sample_sizes: vec![100, 400],
            true_mean: 42.0,
            true_sd: std::f64::consts::PI,
            n_reps: 1000,
        }
    }
}

impl EstimatorStudyPlan {
    pub fn validate(&self) -> Result<()> {
        if self.sample_sizes.is_empty() {
            return Err(Error::domain("no sample sizes"));
        }
        if let Some(n) = self.sample_sizes.iter().find(|&&n| n < 4) {
            return Err(Error::domain(format!("sample size {n} too small for the IQR estimator")));
        }
        if !(self.true_sd > 0.0) || !self.true_mean.is_finite() {
            return Err(Error::domain("true sd must be positive and mean finite"));
        }
        if self.n_reps < 2 {
            return Err(Error::domain("n_reps must be at least 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorScenario {
    pub n: usize,
    pub iqr_estimates: Vec<f64>,
    pub s_estimates: Vec<f64>,
    pub iqr_summary: SummaryStats,
    pub s_summary: SummaryStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorStudyResult {
    pub plan: EstimatorStudyPlan,
    pub root_seed: u64,
    pub scenarios: Vec<EstimatorScenario>,
}

impl EstimatorStudyResult {
    pub fn scenario(&self, n: usize) -> Option<&EstimatorScenario> {
        self.scenarios.iter().find(|s| s.n == n)
    }
}

pub fn run_estimator_study(plan: &EstimatorStudyPlan, root_seed: u64) -> Result<EstimatorStudyResult> {
    run_estimator_study_with(&Harness::new(), plan, root_seed)
}

/// Each replicate draws `n` normals and applies both estimators to the same
/// sample.
pub fn run_estimator_study_with(
    harness: &Harness,
    plan: &EstimatorStudyPlan,
    root_seed: u64,
) -> Result<EstimatorStudyResult> {
    plan.validate()?;
    let scenarios = plan
        .sample_sizes
        .iter()
        .map(|&n| {
            let id = format!("{EXPERIMENT_ID}/n{n}");
            let study = harness.run_replicates(plan.n_reps, &id, root_seed, &["iqr", "s"], |_, stream| {
                let mut sample: Vec<f64> = (0..n).map(|_| stream.normal(plan.true_mean, plan.true_sd)).collect();
                let s = sigma_hat_s(&sample)?;
                sample.sort_by(f64::total_cmp);
                Ok::<_, Error>(vec![sigma_hat_iqr_sorted(&sample)?, s])
            })?;
            let mut channels = study.channels.into_iter();
            let iqr = channels.next().expect("iqr channel");
            let s = channels.next().expect("s channel");
            Ok(EstimatorScenario {
                n,
                iqr_summary: iqr.summary,
                s_summary: s.summary,
                iqr_estimates: iqr.values,
                s_estimates: s.values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimatorStudyResult {
        plan: plan.clone(),
        root_seed,
        scenarios,
    })
}

/// Box-plot summary (quartiles and extremes) of a sampling distribution.
pub fn box_summary(values: &[f64]) -> Result<(f64, SummaryStats, f64)> {
    let s = summarize(values)?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((min, s, max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::normal_quantile;
    use proptest::prelude::*;

    #[test]
    fn constant_matches_normal_quartiles() {
        assert!((2.0 * normal_quantile(0.75) - NORMAL_IQR).abs() < 1e-15);
        assert!((NORMAL_IQR - 1.34898).abs() < 1e-5);
    }

    #[test]
    fn iqr_estimator_small_sample() {
        let v = sigma_hat_iqr(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!((v - 1.5 / NORMAL_IQR).abs() < 1e-15);
        assert!((v - 1.1120).abs() < 1e-4);
        assert_eq!(sigma_hat_iqr(&[2.5; 10]).unwrap(), 0.0);
        assert!(sigma_hat_iqr(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn standard_deviation() {
        assert_eq!(sigma_hat_s(&[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert!((sigma_hat_s(&[2.0, 4.0, 6.0, 8.0]).unwrap() - 2.5820).abs() < 1e-4);
        assert!(sigma_hat_s(&[1.0]).is_err());
    }

    #[test]
    fn plan_validation() {
        let bad = EstimatorStudyPlan {
            sample_sizes: vec![3],
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = EstimatorStudyPlan {
            true_sd: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn study_shapes_and_determinism() {
        let plan = EstimatorStudyPlan {
            n_reps: 50,
            ..Default::default()
        };
        let a = run_estimator_study(&plan, 3).unwrap();
        let b = run_estimator_study_with(&Harness::sequential(), &plan, 3).unwrap();
        assert_eq!(a, b);
        for s in &a.scenarios {
            assert_eq!(s.iqr_estimates.len(), 50);
            assert!(s.iqr_estimates.iter().chain(&s.s_estimates).all(|&v| v >= 0.0));
        }
    }

    proptest! {
        #[test]
        fn location_invariant_and_scale_equivariant(
            x in prop::collection::vec(-10f64..10.0, 4..40),
            shift in -100f64..100.0,
            a in 0.1f64..10.0,
        ) {
            let shifted: Vec<f64> = x.iter().map(|v| v + shift).collect();
            let scaled: Vec<f64> = x.iter().map(|v| a * v).collect();
            let (iqr, s) = (sigma_hat_iqr(&x).unwrap(), sigma_hat_s(&x).unwrap());
            prop_assert!((sigma_hat_iqr(&shifted).unwrap() - iqr).abs() < 1e-10);
            prop_assert!((sigma_hat_s(&shifted).unwrap() - s).abs() < 1e-10);
            prop_assert!((sigma_hat_iqr(&scaled).unwrap() - a * iqr).abs() < 1e-10 * (1.0 + a * iqr));
            prop_assert!((sigma_hat_s(&scaled).unwrap() - a * s).abs() < 1e-10 * (1.0 + a * s));
        }
    }
}
