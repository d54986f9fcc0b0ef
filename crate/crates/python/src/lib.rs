//! Python bindings: `import statlab`.

use std::cell::RefCell;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use statlab_core::numerics::{self, Symmetry};
use statlab_core::report::DEFAULT_SEED;
use statlab_core::{estimator_lab, gof_lab, mh_sampler, pooled_testing, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Bracket { .. } | Error::Config(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(name = "SummaryStats", get_all, frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySummary {
    n: usize,
    mean: f64,
    sd: f64,
    q1: f64,
    median: f64,
    q3: f64,
    iqr: f64,
    degenerate: bool,
}

impl From<numerics::SummaryStats> for PySummary {
    fn from(s: numerics::SummaryStats) -> Self {
        PySummary {
            n: s.n,
            mean: s.mean,
            sd: s.sd,
            q1: s.q1,
            median: s.median,
            q3: s.q3,
            iqr: s.iqr,
            degenerate: s.degenerate,
        }
    }
}

#[pymethods]
impl PySummary {
    fn __repr__(&self) -> String {
        format!(
            "SummaryStats(n={}, mean={}, sd={}, median={}, iqr={})",
            self.n, self.mean, self.sd, self.median, self.iqr
        )
    }
}

#[pyfunction]
fn quantile_type7(sample: Vec<f64>, p: f64) -> PyResult<f64> {
    numerics::quantile_type7(&sample, p).map_err(to_py)
}

#[pyfunction]
fn summarize(sample: Vec<f64>) -> PyResult<PySummary> {
    numerics::summarize(&sample).map(Into::into).map_err(to_py)
}

/// Integrate a Python callable over the real line. Returns
/// `(value, abs_error, evaluations)`.
#[pyfunction]
#[pyo3(signature = (f, rel_tol = numerics::DEFAULT_REL_TOL, even = false))]
fn integrate_real_line(f: &Bound<'_, PyAny>, rel_tol: f64, even: bool) -> PyResult<(f64, f64, u64)> {
    let failure: RefCell<Option<PyErr>> = RefCell::new(None);
    let g = |x: f64| -> f64 {
        if failure.borrow().is_some() {
            return 0.0;
        }
        match f.call1((x,)).and_then(|v| v.extract::<f64>()) {
            Ok(v) => v,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        }
    };
    let symmetry = if even { Symmetry::Even } else { Symmetry::None };
    let result = numerics::integrate_real_line(g, rel_tol, symmetry);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let r = result.map_err(to_py)?;
    Ok((r.value, r.abs_error, r.evaluations))
}

#[pyfunction]
fn expected_tests(k: f64, n: f64, p: f64) -> PyResult<f64> {
    pooled_testing::expected_tests(k, n, p).map_err(to_py)
}

#[pyfunction]
fn savings_ratio(k: f64, p: f64) -> PyResult<f64> {
    pooled_testing::savings_ratio(k, p).map_err(to_py)
}

#[pyclass(name = "ContinuousOptimum", get_all, frozen)]
struct PyContinuousOptimum {
    k: f64,
    cost_per_person: f64,
    stationary_point: Option<f64>,
    boundary: bool,
    pooling_helps: bool,
}

#[pymethods]
impl PyContinuousOptimum {
    fn __repr__(&self) -> String {
        format!("ContinuousOptimum(k={}, boundary={})", self.k, self.boundary)
    }
}

#[pyfunction]
fn optimal_pool_size_continuous(p: f64) -> PyResult<PyContinuousOptimum> {
    let o = pooled_testing::optimal_pool_size_continuous(p).map_err(to_py)?;
    Ok(PyContinuousOptimum {
        k: o.k,
        cost_per_person: o.cost_per_person,
        stationary_point: o.stationary_point,
        boundary: o.boundary,
        pooling_helps: o.pooling_helps,
    })
}

/// Best divisor pool size; `candidates` defaults to every divisor of
/// `population` up to `max_k`. Returns `(k, expected_tests)`.
#[pyfunction]
#[pyo3(signature = (population, p, candidates = None, max_k = 100))]
fn optimal_pool_size_integer(
    population: u64,
    p: f64,
    candidates: Option<Vec<u64>>,
    max_k: u64,
) -> PyResult<(u64, f64)> {
    let candidates = candidates.unwrap_or_else(|| pooled_testing::divisor_candidates(population, max_k));
    let o = pooled_testing::optimal_pool_size_integer(population, p, &candidates).map_err(to_py)?;
    Ok((o.k, o.expected_tests))
}

#[pyclass(name = "PoolingCost", get_all, frozen)]
struct PyPoolingCost {
    pool_size: u64,
    pools: u64,
    prevalence: f64,
    expected_tests_analytic: f64,
    simulated_mean: f64,
    simulated_sd: f64,
    standard_error: f64,
    analytic_variance: f64,
    n_reps: u64,
    savings_ratio: f64,
    totals: Vec<f64>,
}

#[pymethods]
impl PyPoolingCost {
    fn __repr__(&self) -> String {
        format!(
            "PoolingCost(k={}, n={}, analytic={}, simulated={} ± {})",
            self.pool_size, self.pools, self.expected_tests_analytic, self.simulated_mean, self.standard_error
        )
    }
}

#[pyfunction]
#[pyo3(signature = (k, n, p, n_reps = 1000, seed = DEFAULT_SEED))]
fn simulate_pooling(py: Python<'_>, k: u64, n: u64, p: f64, n_reps: u64, seed: u64) -> PyResult<PyPoolingCost> {
    let design = pooled_testing::PoolingDesign::new(k, n, p).map_err(to_py)?;
    let c = py
        .detach(|| pooled_testing::simulate_pooling(&design, n_reps, seed))
        .map_err(to_py)?;
    Ok(PyPoolingCost {
        pool_size: k,
        pools: n,
        prevalence: p,
        expected_tests_analytic: c.expected_tests_analytic,
        simulated_mean: c.simulated_mean,
        simulated_sd: c.simulated_sd,
        standard_error: c.standard_error(),
        analytic_variance: c.analytic_variance(),
        n_reps: c.n_reps,
        savings_ratio: c.savings_ratio,
        totals: c.totals,
    })
}

#[pyfunction]
#[pyo3(signature = (tol = numerics::DEFAULT_REL_TOL))]
fn normalizing_constant(tol: f64) -> PyResult<f64> {
    mh_sampler::normalize(tol).map_err(to_py)
}

#[pyfunction]
fn acceptance_prob(x: f64, y: f64) -> f64 {
    mh_sampler::acceptance_prob(x, y)
}

#[pyclass(name = "MhConfig", get_all, set_all, from_py_object)]
#[derive(Clone)]
struct PyMhConfig {
    proposal_sd: f64,
    burn_in: u64,
    n_samples: u64,
    initial_x: f64,
}

impl From<&PyMhConfig> for mh_sampler::MhConfig {
    fn from(c: &PyMhConfig) -> Self {
        mh_sampler::MhConfig {
            proposal_sd: c.proposal_sd,
            burn_in: c.burn_in,
            n_samples: c.n_samples,
            initial_x: c.initial_x,
        }
    }
}

#[pymethods]
impl PyMhConfig {
    #[new]
    #[pyo3(signature = (proposal_sd = 1.0, burn_in = 100_000, n_samples = 100_000, initial_x = 3.0))]
    fn new(proposal_sd: f64, burn_in: u64, n_samples: u64, initial_x: f64) -> PyResult<Self> {
        let c = PyMhConfig {
            proposal_sd,
            burn_in,
            n_samples,
            initial_x,
        };
        mh_sampler::MhConfig::from(&c).validate().map_err(to_py)?;
        Ok(c)
    }

    fn __repr__(&self) -> String {
        format!(
            "MhConfig(proposal_sd={}, burn_in={}, n_samples={}, initial_x={})",
            self.proposal_sd, self.burn_in, self.n_samples, self.initial_x
        )
    }
}

#[pyclass(name = "ChainResult", get_all, frozen)]
struct PyChainResult {
    samples: Vec<f64>,
    acceptance_rate: f64,
    mean: f64,
    variance: f64,
    positive_fraction: f64,
    root_seed: u64,
}

#[pymethods]
impl PyChainResult {
    /// Largest bin gap between the samples and the normalized density.
    #[pyo3(signature = (bins = 40, lo = -3.0, hi = 3.0))]
    fn density_distance(&self, bins: usize, lo: f64, hi: f64) -> PyResult<f64> {
        let d = mh_sampler::TargetDensity::normalize(numerics::DEFAULT_REL_TOL).map_err(to_py)?;
        mh_sampler::density_distance(&self.samples, &d, bins, (lo, hi)).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "ChainResult(n={}, acceptance_rate={}, mean={}, variance={})",
            self.samples.len(),
            self.acceptance_rate,
            self.mean,
            self.variance
        )
    }
}

#[pyfunction]
#[pyo3(signature = (config = None, seed = DEFAULT_SEED))]
fn run_chain(py: Python<'_>, config: Option<PyMhConfig>, seed: u64) -> PyResult<PyChainResult> {
    let cfg = config.as_ref().map(mh_sampler::MhConfig::from).unwrap_or_default();
    let chain = py.detach(|| mh_sampler::run_chain(&cfg, seed)).map_err(to_py)?;
    let s = chain.summary();
    Ok(PyChainResult {
        acceptance_rate: chain.acceptance_rate,
        mean: s.mean,
        variance: s.variance,
        positive_fraction: s.positive_fraction,
        root_seed: seed,
        samples: chain.samples,
    })
}

#[pyfunction]
fn sigma_hat_iqr(sample: Vec<f64>) -> PyResult<f64> {
    estimator_lab::sigma_hat_iqr(&sample).map_err(to_py)
}

#[pyfunction]
fn sigma_hat_s(sample: Vec<f64>) -> PyResult<f64> {
    estimator_lab::sigma_hat_s(&sample).map_err(to_py)
}

#[pyclass(name = "EstimatorScenario", get_all, frozen)]
struct PyEstimatorScenario {
    n: usize,
    iqr_estimates: Vec<f64>,
    s_estimates: Vec<f64>,
    iqr_summary: PySummary,
    s_summary: PySummary,
}

#[pymethods]
impl PyEstimatorScenario {
    fn __repr__(&self) -> String {
        format!(
            "EstimatorScenario(n={}, iqr_spread={}, s_spread={})",
            self.n, self.iqr_summary.iqr, self.s_summary.iqr
        )
    }
}

#[pyfunction]
#[pyo3(signature = (sample_sizes = vec![100, 400], true_sd = std::f64::consts::PI, n_reps = 1000, true_mean = 42.0, seed = DEFAULT_SEED))]
fn run_estimator_study(
    py: Python<'_>,
    sample_sizes: Vec<usize>,
    true_sd: f64,
    n_reps: u64,
    true_mean: f64,
    seed: u64,
) -> PyResult<Vec<PyEstimatorScenario>> {
    let plan = estimator_lab::EstimatorStudyPlan {
        sample_sizes,
        true_mean,
        true_sd,
        n_reps,
    };
    let r = py.detach(|| estimator_lab::run_estimator_study(&plan, seed)).map_err(to_py)?;
    Ok(r.scenarios
        .into_iter()
        .map(|s| PyEstimatorScenario {
            n: s.n,
            iqr_estimates: s.iqr_estimates,
            s_estimates: s.s_estimates,
            iqr_summary: s.iqr_summary.into(),
            s_summary: s.s_summary.into(),
        })
        .collect())
}

#[pyfunction]
fn pearson_statistic(observed: Vec<u64>, expected: Vec<f64>) -> PyResult<f64> {
    gof_lab::pearson_statistic(&observed, &expected).map_err(to_py)
}

#[pyfunction]
fn chisq_density(x: f64, df: u32) -> PyResult<f64> {
    gof_lab::chisq_density(x, df).map_err(to_py)
}

#[pyclass(name = "GofScenario", get_all, frozen)]
struct PyGofScenario {
    n: usize,
    expected_count: f64,
    statistics: Vec<f64>,
    mean: f64,
    variance: f64,
    mean_se: f64,
    shape_distance: f64,
}

#[pymethods]
impl PyGofScenario {
    fn __repr__(&self) -> String {
        format!(
            "GofScenario(n={}, mean={}, shape_distance={})",
            self.n, self.mean, self.shape_distance
        )
    }
}

#[pyfunction]
#[pyo3(signature = (bins = 8, sample_sizes = vec![16, 64], n_reps = 10_000, seed = DEFAULT_SEED))]
fn simulate_uniform_gof(
    py: Python<'_>,
    bins: usize,
    sample_sizes: Vec<usize>,
    n_reps: u64,
    seed: u64,
) -> PyResult<Vec<PyGofScenario>> {
    let plan = gof_lab::GofPlan {
        bins,
        sample_sizes,
        n_reps,
    };
    let r = py.detach(|| gof_lab::simulate_uniform_gof(&plan, seed)).map_err(to_py)?;
    Ok(r.scenarios
        .into_iter()
        .map(|s| PyGofScenario {
            n: s.n,
            expected_count: s.expected_count,
            statistics: s.statistics,
            mean: s.mean,
            variance: s.variance,
            mean_se: s.mean_se,
            shape_distance: s.shape_distance,
        })
        .collect())
}

#[pymodule]
fn statlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    m.add_class::<PySummary>()?;
    m.add_class::<PyContinuousOptimum>()?;
    m.add_class::<PyPoolingCost>()?;
    m.add_class::<PyMhConfig>()?;
    m.add_class::<PyChainResult>()?;
    m.add_class::<PyEstimatorScenario>()?;
    m.add_class::<PyGofScenario>()?;
    m.add_function(wrap_pyfunction!(quantile_type7, m)?)?;
    m.add_function(wrap_pyfunction!(summarize, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_real_line, m)?)?;
    m.add_function(wrap_pyfunction!(expected_tests, m)?)?;
    m.add_function(wrap_pyfunction!(savings_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_pool_size_continuous, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_pool_size_integer, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_pooling, m)?)?;
    m.add_function(wrap_pyfunction!(normalizing_constant, m)?)?;
    m.add_function(wrap_pyfunction!(acceptance_prob, m)?)?;
    m.add_function(wrap_pyfunction!(run_chain, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_hat_iqr, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_hat_s, m)?)?;
    m.add_function(wrap_pyfunction!(run_estimator_study, m)?)?;
    m.add_function(wrap_pyfunction!(pearson_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(chisq_density, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_uniform_gof, m)?)?;
    Ok(())
}
