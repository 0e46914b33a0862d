use ficogarch::cogarch::{ficogarch_1d1, ficogarch_pdq, stationary_check, FicogarchParams, InitialVariance, PdqParams};
use ficogarch::fracsub::{Driver, FracSubConfig};
use ficogarch::kernels::KernelSpec;
use ficogarch::levy::{JumpSize, LevySpec, PathGrid};
use ficogarch::seed::ensemble;
use ficogarch::Error;
use proptest::prelude::*;

fn setup(d: f64, sigma0: InitialVariance<f64>, t_end: f64) -> (FicogarchParams<f64>, FracSubConfig<f64>) {
    let params = FicogarchParams::new(0.0195, 0.0105, 0.0513, sigma0);
    let driver = Driver::QuadraticVariation(LevySpec::compound_poisson(5.0, JumpSize::Normal { mean: 0.0, var: 0.5 }));
    let cfg = FracSubConfig::new(KernelSpec::modified_mvn(1.0, d).unwrap(), driver, PathGrid::span(0.0, t_end, 0.1).unwrap());
    (params, cfg)
}

#[test]
fn far_from_stationary_start_is_rejected() {
    let (params, cfg) = setup(-0.4, InitialVariance::Value(100.0 * 0.0195), 20.0);
    let paths = ensemble(3, 1000, |key| ficogarch_1d1(&params, &cfg, key)).unwrap();
    let report = stationary_check(&paths, 1.0, 20.0, 0.0, 0.01).unwrap();
    assert!(!report.pass, "KS statistic {}", report.ks.statistic);
    assert!(report.mean_z < -5.0);
}

#[test]
fn stationary_start_needs_positive_kappa() {
    let (mut params, cfg) = setup(-0.4, InitialVariance::Stationary, 5.0);
    params.alpha1 = 0.05;
    assert!(params.kappa(&cfg) <= 0.0);
    assert!(matches!(ficogarch_1d1(&params, &cfg, 1), Err(Error::NonStationary(_))));
}

#[test]
fn order_one_pdq_tracks_order_one_model() {
    let (params, cfg) = setup(-0.3, InitialVariance::Value(0.03), 10.0);
    let pdq = PdqParams::from_order_one(&params, 0.03);
    let mut fine = cfg;
    fine.grid = PathGrid::span(0.0, 10.0, 0.001).unwrap();
    let a = ficogarch_1d1(&params, &fine, 5).unwrap();
    let b = ficogarch_pdq(&pdq, &fine, 5).unwrap();
    for (x, y) in a.sigma_sq.iter().zip(&b.sigma_sq) {
        assert!((x - y).abs() < 1e-3 * x, "{x} vs {y}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn variance_stays_positive(seed in any::<u64>(), d in -0.45f64..-0.05, stationary in any::<bool>()) {
        let sigma0 = if stationary { InitialVariance::Stationary } else { InitialVariance::Value(0.05) };
        let (params, cfg) = setup(d, sigma0, 30.0);
        let path = ficogarch_1d1(&params, &cfg, seed).unwrap();
        prop_assert!(path.sigma_sq.iter().all(|s| *s > 0.0 && s.is_finite()));
        prop_assert!(!path.nonpositive_variance);
        prop_assert_eq!(path.g[0], 0.0);
    }
}
