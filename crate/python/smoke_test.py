"""Smoke test for the statlab extension module.

Build and run from the repository root:

    cargo build --release -p statlab-python --features extension-module
    cp target/release/libstatlab.so python/statlab.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import statlab  # noqa: E402


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    close(statlab.expected_tests(10, 500, 0.05), 2506.3, 0.05)
    close(statlab.savings_ratio(5, 0.05), 2.35, 0.01)
    opt = statlab.optimal_pool_size_continuous(0.05)
    close(opt.k, 5.022, 0.005)
    assert not opt.boundary
    k, cost = statlab.optimal_pool_size_integer(5000, 0.05)
    assert k == 5, k

    sim = statlab.simulate_pooling(10, 500, 0.05, n_reps=2000, seed=1)
    assert abs(sim.simulated_mean - sim.expected_tests_analytic) <= 4 * sim.standard_error
    assert len(sim.totals) == 2000

    close(1 / statlab.normalizing_constant(), 6.809611, 1e-5)
    close(statlab.acceptance_prob(1.0, 0.0), math.e / 8, 1e-12)
    assert statlab.acceptance_prob(0.0, 1.0) == 1.0
    chain = statlab.run_chain(statlab.MhConfig(burn_in=5000, n_samples=20000), seed=3)
    assert 0.2 < chain.acceptance_rate < 0.8
    assert chain.density_distance() < 0.05

    study = statlab.run_estimator_study(n_reps=200)
    for sc in study:
        assert sc.s_summary.iqr < sc.iqr_summary.iqr
    close(statlab.sigma_hat_s([1.0, 2.0, 3.0]), 1.0, 1e-12)

    gof = statlab.simulate_uniform_gof(n_reps=2000)
    for sc in gof:
        close(sc.mean, 7.0, 4 * sc.mean_se)
    close(statlab.pearson_statistic([3, 1], [2.0, 2.0]), 1.0, 1e-12)
    close(statlab.chisq_density(2.0, 2), 0.5 * math.exp(-1.0), 1e-12)

    value, _, _ = statlab.integrate_real_line(lambda x: math.exp(-x * x), even=True)
    close(value, math.sqrt(math.pi), 1e-9)
    close(statlab.quantile_type7([1.0, 2.0, 3.0, 4.0], 0.5), 2.5, 1e-12)
    assert statlab.summarize([1.0, 2.0, 3.0]).median == 2.0

    try:
        statlab.expected_tests(10, 500, 1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("invalid prevalence accepted")

    try:
        statlab.integrate_real_line(lambda x: 1 / 0)
    except ZeroDivisionError:
        pass
    else:
        raise AssertionError("callable error swallowed")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
