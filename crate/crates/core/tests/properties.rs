use ficogarch::covariance::closed_form_f_squared;
use ficogarch::fracsub::{frac_path, Driver, FracSubConfig};
use ficogarch::kernels::{kernel_norm, kernel_value, KernelSpec};
use ficogarch::levy::{JumpSize, LevySpec, PathGrid};
use ficogarch::stats::{covariance_estimate, ks_two_sample, loglog_slope, sample_acf};
use proptest::prelude::*;

fn series(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n..n + 200)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn acf_is_bounded(x in series(100)) {
        prop_assume!(x.iter().any(|v| (v - x[0]).abs() > 1e-6));
        let acf = sample_acf(&x, 20).unwrap();
        prop_assert_eq!(acf[0], 1.0);
        for r in &acf {
            prop_assert!(r.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn slope_recovers_power_laws(c in 0.01f64..100.0, beta in -3.0f64..3.0, n in 3usize..40) {
        let x: Vec<f64> = (1..=n).map(|i| i as f64 * 1.7).collect();
        let y: Vec<f64> = x.iter().map(|v| c * v.powf(beta)).collect();
        let (slope, se) = loglog_slope(&x, &y).unwrap();
        prop_assert!((slope - beta).abs() < 1e-9);
        prop_assert!(se < 1e-7);
    }

    #[test]
    fn slope_ignores_scale(y in prop::collection::vec(0.01f64..100.0, 5..50), scale in 0.001f64..1000.0) {
        let x: Vec<f64> = (1..=y.len()).map(|i| i as f64).collect();
        let scaled: Vec<f64> = y.iter().map(|v| v * scale).collect();
        let (a, sa) = loglog_slope(&x, &y).unwrap();
        let (b, sb) = loglog_slope(&x, &scaled).unwrap();
        prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
        prop_assert!((sa - sb).abs() < 1e-9 * (1.0 + sa));
    }

    #[test]
    fn covariance_is_symmetric(pairs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..100)) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let a = covariance_estimate(&x, &y).unwrap();
        let b = covariance_estimate(&y, &x).unwrap();
        prop_assert!((a.value - b.value).abs() < 1e-12);
        prop_assert!((a.stderr - b.stderr).abs() < 1e-12);
    }

    #[test]
    fn ks_statistic_is_a_distance(seed in 0u64..1000) {
        let a: Vec<f64> = (0..1000).map(|i| ((i as u64 * 2654435761 + seed) % 1009) as f64).collect();
        let b: Vec<f64> = (0..1200).map(|i| ((i as u64 * 40503 + 3 * seed) % 997) as f64).collect();
        let ks = ks_two_sample(&a, &b, 0.05).unwrap();
        prop_assert!((0.0..=1.0).contains(&ks.statistic));
        let same = ks_two_sample(&a, &a, 0.05).unwrap();
        prop_assert_eq!(same.statistic, 0.0);
        prop_assert!(same.pass);
    }

    #[test]
    fn modified_kernel_is_bounded(a in 0.1f64..5.0, d in -0.49f64..-0.01, t in 0.0f64..50.0, s in -500.0f64..60.0) {
        let spec = KernelSpec::modified_mvn(a, d).unwrap();
        let f = kernel_value(&spec, t, s).unwrap();
        prop_assert!(f >= 0.0);
        prop_assert!(f <= a.powf(d) * (1.0 + 1e-12));
    }

    #[test]
    fn squared_norm_matches_closed_form(a in 0.2f64..3.0, d in -0.45f64..-0.05, t in 0.1f64..20.0) {
        let spec = KernelSpec::modified_mvn(a, d).unwrap();
        let quad = kernel_norm(&spec, t, 2.0, 1e-11).unwrap();
        let exact = closed_form_f_squared(a, d, t).unwrap();
        prop_assert!((quad - exact).abs() <= 1e-8 * exact.max(1.0), "quad {} exact {}", quad, exact);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn subordinator_paths_are_monotone(seed in any::<u64>(), d in -0.45f64..-0.05, rate in 0.1f64..3.0) {
        let driver = Driver::Subordinator(LevySpec::compound_poisson(rate, JumpSize::Exponential { rate: 2.0 }));
        let cfg = FracSubConfig::new(KernelSpec::modified_mvn(1.0, d).unwrap(), driver, PathGrid::span(0.0, 10.0, 0.05).unwrap());
        let path = frac_path(&cfg, seed).unwrap();
        prop_assert!(path.is_non_decreasing());
        prop_assert_eq!(path.values.len(), 201);
    }

    #[test]
    fn paths_are_reproducible(seed in any::<u64>()) {
        let driver = Driver::QuadraticVariation(LevySpec::compound_poisson(0.4, JumpSize::Normal { mean: 0.0, var: 1.0 }));
        let cfg = FracSubConfig::new(KernelSpec::modified_mvn(1.0, -0.25).unwrap(), driver, PathGrid::span(0.0, 5.0, 0.1).unwrap());
        prop_assert_eq!(frac_path(&cfg, seed).unwrap(), frac_path(&cfg, seed).unwrap());
    }
}

#[test]
fn single_precision_paths() {
    let driver = Driver::Subordinator(LevySpec::compound_poisson(1.0f32, JumpSize::Constant { value: 1.0 }));
    let cfg = FracSubConfig::new(KernelSpec::modified_mvn(1.0f32, -0.25).unwrap(), driver, PathGrid::span(0.0f32, 5.0, 0.1).unwrap());
    let p32 = frac_path(&cfg, 7).unwrap();
    assert!(p32.is_non_decreasing());

    let driver = Driver::Subordinator(LevySpec::compound_poisson(1.0f64, JumpSize::Constant { value: 1.0 }));
    let cfg = FracSubConfig::new(KernelSpec::modified_mvn(1.0f64, -0.25).unwrap(), driver, PathGrid::span(0.0f64, 5.0, 0.1).unwrap());
    let p64 = frac_path(&cfg, 7).unwrap();
    for (a, b) in p32.values.iter().zip(&p64.values) {
        assert!((*a as f64 - b).abs() < 1e-3 * (1.0 + b.abs()), "{a} vs {b}");
    }
}
