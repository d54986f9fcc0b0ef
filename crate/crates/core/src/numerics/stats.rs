//! Order statistics and sample summaries.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    /// Standard deviation with divisor `n - 1`; zero when `n == 1`.
    pub sd: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub iqr: f64,
    /// Set when `n == 1` and the spread statistics carry no information.
    pub degenerate: bool,
}

/// Type-7 quantile of an already sorted sample: with `h = (n - 1) p + 1`,
/// interpolate linearly between the order statistics `x_(⌊h⌋)` and
/// `x_(⌊h⌋+1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::domain("quantile of an empty sample"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("quantile level must lie in [0, 1], got {p}")));
    }
    let n = sorted.len();
    // zero-based position of h
    let pos = (n - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 >= n {
        return Ok(sorted[n - 1]);
    }
    Ok(sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]))
}

fn sorted_copy(sample: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = sample.iter().find(|x| !x.is_finite()) {
        return Err(Error::domain(format!("non-finite observation {bad}")));
    }
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Type-7 (linear interpolation) quantile of `sample` at level `p`.
pub fn quantile_type7(sample: &[f64], p: f64) -> Result<f64> {
    quantile_sorted(&sorted_copy(sample)?, p)
}

/// Arithmetic mean and `n - 1` standard deviation (two-pass).
pub fn mean_sd(sample: &[f64]) -> (f64, f64) {
    let n = sample.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = sample.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = sample.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

pub fn summarize(sample: &[f64]) -> Result<SummaryStats> {
    if sample.is_empty() {
        return Err(Error::domain("summary of an empty sample"));
    }
    let sorted = sorted_copy(sample)?;
    let (mean, mut sd) = mean_sd(&sorted);
    // exact zero spread for constant samples regardless of rounding in the mean
    if sorted[0] == sorted[sorted.len() - 1] {
        sd = 0.0;
    }
    let q1 = quantile_sorted(&sorted, 0.25)?;
    let median = quantile_sorted(&sorted, 0.5)?;
    let q3 = quantile_sorted(&sorted, 0.75)?;
    Ok(SummaryStats {
        n: sorted.len(),
        mean,
        sd,
        q1,
        median,
        q3,
        iqr: q3 - q1,
        degenerate: sorted.len() == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn type7_quartile_of_four() {
        assert_eq!(quantile_type7(&[4.0, 2.0, 3.0, 1.0], 0.25).unwrap(), 1.75);
        assert_eq!(quantile_type7(&[1.0, 2.0, 3.0, 4.0], 0.75).unwrap(), 3.25);
    }

    #[test]
    fn extremes() {
        let x = [3.5, -1.0, 7.25, 0.0];
        assert_eq!(quantile_type7(&x, 0.0).unwrap(), -1.0);
        assert_eq!(quantile_type7(&x, 1.0).unwrap(), 7.25);
    }

    #[test]
    fn empty_and_bad_level() {
        assert!(matches!(quantile_type7(&[], 0.5), Err(Error::Domain(_))));
        assert!(matches!(quantile_type7(&[1.0], 1.5), Err(Error::Domain(_))));
        assert!(matches!(summarize(&[]), Err(Error::Domain(_))));
    }

    #[test]
    fn summaries() {
        let s = summarize(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.sd, 1.0);
        let s = summarize(&[2.0, 4.0, 6.0, 8.0]).unwrap();
        assert!((s.sd - (20.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s.sd - 2.5820).abs() < 1e-4);
        let s = summarize(&[0.1, 0.1, 0.1]).unwrap();
        assert_eq!(s.sd, 0.0);
        assert_eq!(s.iqr, 0.0);
    }

    #[test]
    fn single_observation_is_degenerate() {
        let s = summarize(&[5.0]).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.sd, 0.0);
        assert_eq!(s.median, 5.0);
    }

    proptest! {
        #[test]
        fn equivariance(
            x in prop::collection::vec(-1e3f64..1e3, 1..60),
            p in 0.0f64..=1.0,
            a in 0.01f64..100.0,
            b in -1e3f64..1e3,
        ) {
            let q = quantile_type7(&x, p).unwrap();
            let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let qy = quantile_type7(&y, p).unwrap();
            let scale = (a * q).abs() + b.abs() + 1.0;
            prop_assert!((qy - (a * q + b)).abs() <= 1e-9 * scale);
        }

        #[test]
        fn monotone_in_level(x in prop::collection::vec(-1e3f64..1e3, 1..60), p in 0.0f64..1.0, dp in 0.0f64..1.0) {
            let p2 = (p + dp).min(1.0);
            prop_assert!(quantile_type7(&x, p).unwrap() <= quantile_type7(&x, p2).unwrap());
        }

        #[test]
        fn summary_invariants(x in prop::collection::vec(-1e3f64..1e3, 1..60)) {
            let s = summarize(&x).unwrap();
            prop_assert!(s.q1 <= s.median && s.median <= s.q3);
            prop_assert_eq!(s.iqr, quantile_type7(&x, 0.75).unwrap() - quantile_type7(&x, 0.25).unwrap());
            prop_assert!(s.sd >= 0.0);
            let constant = x.iter().all(|v| *v == x[0]);
            prop_assert_eq!(s.sd == 0.0, constant);
        }
    }
}
