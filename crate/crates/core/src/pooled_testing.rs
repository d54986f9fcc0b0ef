//! Two-stage pooled screening: test every pool once, then test each member
//! of a positive pool individually. All tests in a stage run at the same
//! time, so a positive pool of `k` always costs `k` follow-up tests.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{minimize_scalar, solve_root, DEFAULT_TOL};
use crate::simkit::Harness;

pub const EXPERIMENT_ID: &str = "pooling";

fn check_prevalence(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("prevalence must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Probability that a pool of `k` contains at least one positive.
fn pool_positive(k: f64, p: f64) -> f64 {
    -((k * (-p).ln_1p()).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoolingDesign {
    /// Persons per pool.
    pool_size: u64,
    /// Number of pools.
    pools: u64,
    prevalence: f64,
}

impl PoolingDesign {
    pub fn new(pool_size: u64, pools: u64, prevalence: f64) -> Result<Self> {
        if pool_size < 1 || pools < 1 {
            return Err(Error::domain("pool size and pool count must be positive"));
        }
        check_prevalence(prevalence)?;
        pool_size
            .checked_mul(pools)
            .ok_or_else(|| Error::domain("population overflows u64"))?;
        Ok(PoolingDesign {
            pool_size,
            pools,
            prevalence,
        })
    }

    /// Split a population of `population` into pools of `pool_size`.
    pub fn from_population(population: u64, pool_size: u64, prevalence: f64) -> Result<Self> {
        if pool_size == 0 || population % pool_size != 0 {
            return Err(Error::domain(format!(
                "pool size {pool_size} does not divide population {population}"
            )));
        }
        PoolingDesign::new(pool_size, population / pool_size, prevalence)
    }

    pub fn pool_size(&self) -> u64 {
        self.pool_size
    }

    pub fn pools(&self) -> u64 {
        self.pools
    }

    pub fn population(&self) -> u64 {
        self.pool_size * self.pools
    }

    pub fn prevalence(&self) -> f64 {
        self.prevalence
    }

    pub fn expected_tests(&self) -> f64 {
        expected_tests_unchecked(self.pool_size as f64, self.pools as f64, self.prevalence())
    }
}

fn expected_tests_unchecked(k: f64, n: f64, p: f64) -> f64 {
    n + k * n * pool_positive(k, p)
}

/// Expected total tests `n + k n (1 - (1-p)^k)` for `n` pools of size `k`.
/// Defined for real `k` so the cost can be optimized continuously.
pub fn expected_tests(k: f64, n: f64, p: f64) -> Result<f64> {
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::domain(format!("pool size must be >= 1, got {k}")));
    }
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::domain(format!("pool count must be positive, got {n}")));
    }
    check_prevalence(p)?;
    Ok(expected_tests_unchecked(k, n, p))
}

/// Expected tests per person, `1/k + 1 - (1-p)^k`.
pub fn cost_per_person(k: f64, p: f64) -> f64 {
    1.0 / k + pool_positive(k, p)
}

/// Individual-testing cost over pooled cost, `n k / E[T]`; independent of `n`.
pub fn savings_ratio(k: f64, p: f64) -> Result<f64> {
    Ok(k / expected_tests(k, 1.0, p)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuousOptimum {
    /// Cost-minimizing pool size (or the clamped bracket end when `boundary`).
    pub k: f64,
    /// Expected tests per person at `k`.
    pub cost_per_person: f64,
    /// Root of the optimality condition `1/k² = -ln(1-p) (1-p)^k` found by
    /// bisection on the refinement bracket; `None` when there is no
    /// interior minimum.
    pub stationary_point: Option<f64>,
    /// No interior local minimum inside the search bracket.
    pub boundary: bool,
    /// Pooling costs less than one test per person at `k`.
    pub pooling_helps: bool,
}

/// Search bracket `[1.5, max(50, 10/p)]` for the continuous optimum.
pub fn search_bracket(p: f64) -> (f64, f64) {
    (1.5, 50f64.max(10.0 / p))
}

const GRID_POINTS: usize = 2000;

fn continuous_optimum_of<F: Fn(f64) -> f64>(cost: F, p: f64) -> Result<ContinuousOptimum> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("continuous optimum needs 0 < p < 1, got {p}")));
    }
    let (lo, hi) = search_bracket(p);
    // cost is not unimodal on the full bracket: past the Dorfman minimum it
    // rises to a local maximum and then decays towards 1, so locate the
    // first interior local minimum on a log grid before refining.
    let ratio = (hi / lo).ln() / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo * (ratio * i as f64).exp()).collect();
    let values: Vec<f64> = grid.iter().map(|&k| cost(k)).collect();
    let interior = (1..GRID_POINTS - 1).find(|&i| values[i] <= values[i - 1] && values[i] < values[i + 1]);
    let per_person = |k: f64| cost_per_person(k, p);
    match interior {
        Some(i) => {
            let (a, b) = (grid[i - 1], grid[i + 1]);
            let m = minimize_scalar(&cost, a, b, DEFAULT_TOL)?;
            let q = 1.0 - p;
            let stationary =
                solve_root(|k| 1.0 / (k * k) + q.ln() * q.powf(k), a, b, DEFAULT_TOL).ok();
            let c = per_person(m.argmin);
            Ok(ContinuousOptimum {
                k: m.argmin,
                cost_per_person: c,
                stationary_point: stationary,
                boundary: false,
                pooling_helps: c < 1.0,
            })
        }
        None => {
            let k = if values[0] <= values[GRID_POINTS - 1] { lo } else { hi };
            let c = per_person(k);
            Ok(ContinuousOptimum {
                k,
                cost_per_person: c,
                stationary_point: None,
                boundary: true,
                pooling_helps: c < 1.0,
            })
        }
    }
}

/// Minimize `1/k + 1 - (1-p)^k` over real `k`.
pub fn optimal_pool_size_continuous(p: f64) -> Result<ContinuousOptimum> {
    continuous_optimum_of(|k| cost_per_person(k, p), p)
}

/// Minimize total expected tests `E[T](k, N/k, p)` for a population of `N`.
/// The minimizer does not depend on `N`.
pub fn optimal_pool_size_for_population(population: f64, p: f64) -> Result<ContinuousOptimum> {
    if !(population > 0.0) {
        return Err(Error::domain("population must be positive"));
    }
    continuous_optimum_of(|k| expected_tests_unchecked(k, population / k, p), p)
}

/// Divisors of `population` in `[2, max_k]`, ascending.
pub fn divisor_candidates(population: u64, max_k: u64) -> Vec<u64> {
    (2..=max_k.min(population)).filter(|k| population % k == 0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegerOptimum {
    pub k: u64,
    pub expected_tests: f64,
}

/// Best pool size among `candidates`, each a divisor of `population` and at
/// least 2. Ties go to the smaller pool.
pub fn optimal_pool_size_integer(population: u64, p: f64, candidates: &[u64]) -> Result<IntegerOptimum> {
    if candidates.is_empty() {
        return Err(Error::domain("no candidate pool sizes"));
    }
    check_prevalence(p)?;
    let mut best: Option<IntegerOptimum> = None;
    for &k in candidates {
        if k < 2 || population % k != 0 {
            return Err(Error::domain(format!(
                "candidate {k} must be >= 2 and divide population {population}"
            )));
        }
        let e = expected_tests(k as f64, (population / k) as f64, p)?;
        let better = match best {
            None => true,
            Some(b) => e < b.expected_tests || (e == b.expected_tests && k < b.k),
        };
        if better {
            best = Some(IntegerOptimum { k, expected_tests: e });
        }
    }
    Ok(best.expect("candidates checked non-empty"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub k: f64,
    pub expected_tests: f64,
}

/// `E[T](k, N/k, p)` on `points` evenly spaced `k` in `[k_lo, k_hi]`.
pub fn cost_curve(population: u64, p: f64, k_lo: f64, k_hi: f64, points: usize) -> Result<Vec<CurvePoint>> {
    if !(k_lo >= 2.0 && k_lo < k_hi && k_hi <= population as f64) {
        return Err(Error::domain(format!(
            "k range [{k_lo}, {k_hi}] must satisfy 2 <= lo < hi <= N = {population}"
        )));
    }
    if points < 2 {
        return Err(Error::domain("a curve needs at least two points"));
    }
    let n = population as f64;
    (0..points)
        .map(|i| {
            let k = k_lo + (k_hi - k_lo) * i as f64 / (points - 1) as f64;
            Ok(CurvePoint {
                k,
                expected_tests: expected_tests(k, n / k, p)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoolingCost {
    pub design: PoolingDesign,
    pub prevalence: f64,
    pub expected_tests_analytic: f64,
    pub simulated_mean: f64,
    pub simulated_sd: f64,
    pub n_reps: u64,
    /// `E[T_A] / E[T_B]` from the analytic expectation.
    pub savings_ratio: f64,
    #[serde(skip)]
    pub totals: Vec<f64>,
}

impl PoolingCost {
    pub fn standard_error(&self) -> f64 {
        self.simulated_sd / (self.n_reps as f64).sqrt()
    }

    /// Distance between the tracks in units of the simulation standard error.
    pub fn z_score(&self) -> f64 {
        (self.simulated_mean - self.expected_tests_analytic) / self.standard_error()
    }

    /// Exact variance of the per-replicate total, `k² n q (1 - q)`.
    pub fn analytic_variance(&self) -> f64 {
        let k = self.design.pool_size() as f64;
        let q = pool_positive(k, self.prevalence);
        k * k * self.design.pools() as f64 * q * (1.0 - q)
    }
}

/// Total tests for one simulated population: draw each status in order,
/// fill pools with consecutive persons.
pub fn simulate_once(design: &PoolingDesign, stream: &mut crate::simkit::RngStream) -> u64 {
    let p = design.prevalence();
    let mut positive_pools = 0u64;
    for _ in 0..design.pools {
        let mut any = false;
        for _ in 0..design.pool_size {
            // every status is drawn so stream consumption is fixed per replicate
            any |= stream.bernoulli(p);
        }
        positive_pools += u64::from(any);
    }
    design.pools + design.pool_size * positive_pools
}

pub fn simulate_pooling(design: &PoolingDesign, n_reps: u64, root_seed: u64) -> Result<PoolingCost> {
    simulate_pooling_with(&Harness::new(), design, n_reps, root_seed)
}

pub fn simulate_pooling_with(
    harness: &Harness,
    design: &PoolingDesign,
    n_reps: u64,
    root_seed: u64,
) -> Result<PoolingCost> {
    let experiment = format!("{EXPERIMENT_ID}/k{}/n{}", design.pool_size(), design.pools());
    let study = harness.run_replicates(n_reps, &experiment, root_seed, &["total_tests"], |_, s| {
        Ok::<_, std::convert::Infallible>(vec![simulate_once(design, s) as f64])
    })?;
    let channel = study.channels.into_iter().next().expect("one channel");
    let analytic = design.expected_tests();
    Ok(PoolingCost {
        design: *design,
        prevalence: design.prevalence(),
        expected_tests_analytic: analytic,
        simulated_mean: channel.summary.mean,
        simulated_sd: channel.summary.sd,
        n_reps,
        savings_ratio: design.population() as f64 / analytic,
        totals: channel.values,
    })
}
