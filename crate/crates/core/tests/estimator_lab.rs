use statlab::estimator_lab::{run_estimator_study, sigma_hat_iqr, sigma_hat_s, EstimatorStudyPlan};
use statlab::simkit::make_stream;

#[test]
fn estimators_ignore_location_shifts() {
    let mut s = make_stream(1, "shift", 0);
    for _ in 0..200 {
        let x: Vec<f64> = (0..100).map(|_| s.normal(0.0, 3.0)).collect();
        let shifted: Vec<f64> = x.iter().map(|v| v + 42.0).collect();
        assert!((sigma_hat_iqr(&x).unwrap() - sigma_hat_iqr(&shifted).unwrap()).abs() <= 1e-12);
        assert!((sigma_hat_s(&x).unwrap() - sigma_hat_s(&shifted).unwrap()).abs() <= 1e-12);
    }
}

#[test]
fn estimators_scale_with_the_data() {
    let mut s = make_stream(2, "scale", 0);
    let x: Vec<f64> = (0..400).map(|_| s.normal(0.0, 1.0)).collect();
    for a in [0.5, 2.0, 1e3] {
        let y: Vec<f64> = x.iter().map(|v| a * v).collect();
        let r = sigma_hat_iqr(&y).unwrap() / (a * sigma_hat_iqr(&x).unwrap());
        assert!((r - 1.0).abs() < 1e-12);
        let r = sigma_hat_s(&y).unwrap() / (a * sigma_hat_s(&x).unwrap());
        assert!((r - 1.0).abs() < 1e-12);
    }
}

#[test]
fn center_and_efficiency_at_defaults() {
    let r = run_estimator_study(&EstimatorStudyPlan::default(), statlab::report::DEFAULT_SEED).unwrap();
    for sc in &r.scenarios {
        assert_eq!(sc.iqr_estimates.len(), 1000);
        for summary in [&sc.iqr_summary, &sc.s_summary] {
            assert!((summary.mean - std::f64::consts::PI).abs() <= 0.05, "n={}: {}", sc.n, summary.mean);
        }
    }
}

#[test]
fn efficiency_ordering_across_seeds() {
    for seed in 0..5 {
        let r = run_estimator_study(&EstimatorStudyPlan::default(), seed).unwrap();
        for sc in &r.scenarios {
            assert!(sc.s_summary.iqr < sc.iqr_summary.iqr, "seed {seed} n={}", sc.n);
        }
    }
}
