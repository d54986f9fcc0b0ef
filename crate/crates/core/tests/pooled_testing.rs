use statlab::pooled_testing::{
    expected_tests, optimal_pool_size_continuous, optimal_pool_size_for_population, simulate_pooling, PoolingDesign,
};
use statlab::simkit::make_stream;

#[test]
fn random_designs_agree_with_analytic_track() {
    let mut s = make_stream(2024, "designs", 0);
    for i in 0..10 {
        let k = 2 + (s.uniform01() * 19.0) as u64;
        let n = 20 + (s.uniform01() * 181.0) as u64;
        let p = s.uniform(0.005, 0.2);
        let design = PoolingDesign::new(k, n, p).unwrap();
        let sim = simulate_pooling(&design, 10_000, 100 + i).unwrap();
        let expected = design.expected_tests();
        assert!(
            (sim.simulated_mean - expected).abs() <= 3.0 * sim.standard_error(),
            "design {i} (k={k}, n={n}, p={p}): z = {}",
            sim.z_score()
        );
        let var = sim.simulated_sd.powi(2);
        let exact = sim.analytic_variance();
        assert!((var - exact).abs() <= 0.15 * exact, "design {i}: variance {var} vs {exact}");
        let (lo, hi) = (n as f64, (n + k * n) as f64);
        assert!(sim.totals.iter().all(|&t| t >= lo && t <= hi));
    }
}

#[test]
fn expectation_bounds() {
    for k in [2.0, 3.5, 10.0, 40.0] {
        for n in [1.0, 17.0, 500.0] {
            for p in [0.0, 0.001, 0.05, 0.5, 1.0] {
                let e = expected_tests(k, n, p).unwrap();
                assert!(e >= n && e <= n + k * n, "k={k} n={n} p={p}: {e}");
            }
        }
    }
}

#[test]
fn continuous_optimum_is_scale_free() {
    for p in [0.01, 0.05, 0.1] {
        let base = optimal_pool_size_continuous(p).unwrap();
        for population in [1e3, 1e6] {
            assert_eq!(optimal_pool_size_for_population(population, p).unwrap(), base);
        }
    }
}
