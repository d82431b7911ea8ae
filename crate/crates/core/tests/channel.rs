use proptest::prelude::*;
use risfade::channel::{FadingParams, Variant};
use risfade::numerics::{integrate, QuadratureSpec, RandomSource};

#[test]
fn density_integrates_to_one_on_grid() {
    let spec = QuadratureSpec::default();
    for m in [0.5, 1.0, 2.0, 3.5] {
        for m_s in [1.2, 1.5, 2.5, 10.0] {
            let p = FadingParams::modified(m, m_s).unwrap();
            let mass = integrate(|h| p.pdf(h), 0.0, f64::INFINITY, &spec).unwrap();
            assert!((mass - 1.0).abs() <= 1e-8, "({m}, {m_s}): {mass}");
        }
    }
}

#[test]
fn modified_mean_power_identity_at_random_points() {
    let mut rng = RandomSource::new(99);
    for _ in 0..20 {
        let m = 0.2 + 6.0 * rng.uniform();
        let m_s = 1.01 + 30.0 * rng.uniform();
        let p = FadingParams::modified(m, m_s).unwrap();
        assert_eq!(p.mean_power(), 1.0);
        assert_eq!(p.variant(), Variant::Modified);
        let identity = m_s * p.omega_m() / ((m_s - 1.0) * p.omega_s());
        assert!((identity - 1.0).abs() < 1e-15);
    }
}

#[test]
fn shadowing_trends() {
    let shapes = [1.2, 1.5, 2.0, 2.5, 5.0, 10.0, 50.0];
    for m in [0.5, 1.0, 2.0, 3.5] {
        let modified: Vec<f64> = shapes
            .iter()
            .map(|&s| FadingParams::modified(m, s).unwrap().mean_envelope())
            .collect();
        assert!(modified.windows(2).all(|w| w[1] > w[0]), "m = {m}: {modified:?}");
        let conventional: Vec<f64> = shapes
            .iter()
            .map(|&s| FadingParams::conventional(m, s, 1.0).unwrap().mean_power())
            .collect();
        assert!(conventional.windows(2).all(|w| w[1] < w[0]), "m = {m}: {conventional:?}");
    }
}

#[test]
fn invalid_shapes_are_domain_errors() {
    assert!(FadingParams::modified(0.0, 2.0).is_err());
    assert!(FadingParams::modified(1.0, 1.0).is_err());
    assert!(FadingParams::conventional(1.0, 2.0, -1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cdf_and_survival_are_complementary(m in 0.3f64..6.0, m_s in 1.05f64..20.0, h in 0.0f64..8.0) {
        let p = FadingParams::modified(m, m_s).unwrap();
        let (c, s) = (p.cdf(h), p.survival(h));
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!((c + s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_matches_integrated_density(m in 0.5f64..5.0, m_s in 1.2f64..15.0, h in 0.05f64..5.0) {
        let p = FadingParams::modified(m, m_s).unwrap();
        let spec = QuadratureSpec::default().with_tolerances(1e-13, 1e-11);
        let q = integrate(|x| p.pdf(x), 0.0, h, &spec).unwrap();
        prop_assert!((q - p.cdf(h)).abs() < 1e-9, "{} vs {}", q, p.cdf(h));
    }

    #[test]
    fn mean_envelope_is_below_rms(m in 0.3f64..6.0, m_s in 1.05f64..20.0) {
        let p = FadingParams::modified(m, m_s).unwrap();
        prop_assert!(p.mean_envelope() > 0.0);
        prop_assert!(p.mean_envelope() <= 1.0);
        prop_assert!(p.variance_envelope() >= 0.0);
    }
}
