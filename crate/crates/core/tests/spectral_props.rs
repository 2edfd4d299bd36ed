use majorant_core::spectral::{
    convolution_power, convolve, exact_majorant, norm_even, norm_p, norm_p_on_grid, power_product,
    reflect_conjugate, PeriodicGrid,
};
use majorant_core::sumset::{majorant_window, sumset};
use majorant_core::{CoefficientSequence, Complex64, FrequencySet, QuadratureConfig};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn sequence(max_len: usize) -> impl Strategy<Value = CoefficientSequence> {
    prop::collection::btree_map(-6i64..=6, (-2.0f64..2.0, -2.0f64..2.0), 1..=max_len)
        .prop_filter("nonzero", |m| {
            m.values().any(|(a, b)| a.abs() + b.abs() > 1e-3)
        })
        .prop_map(|m| {
            CoefficientSequence::from_pairs(
                m.into_iter().map(|(n, (a, b))| (n, Complex64::new(a, b))),
            )
        })
}

fn nonneg_sequence(max_len: usize) -> impl Strategy<Value = CoefficientSequence> {
    prop::collection::btree_map(-4i64..=4, 0.01f64..2.0, 1..=max_len)
        .prop_map(|m| CoefficientSequence::from_real(m))
}

fn frequency_set() -> impl Strategy<Value = FrequencySet> {
    prop::collection::btree_set(-8i64..=8, 1..=4).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        rng_seed: RngSeed::Fixed(0x5eed0002),
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn parseval_matches_quadrature(g in sequence(5)) {
        let direct: f64 = g.iter().map(|(_, v)| v.norm_sqr()).sum::<f64>().sqrt();
        let quad = norm_p(&g, 2.0, &QuadratureConfig::default()).unwrap();
        prop_assert!((direct - norm_even(&g, 1).unwrap()).abs() <= 1e-12 * direct);
        prop_assert!((direct - quad).abs() <= 1e-10 * direct);
    }

    #[test]
    fn convolution_matches_pointwise_product(a in sequence(4), b in sequence(4), theta in -3.0f64..3.0) {
        let lhs = convolve(&a, &b).eval(theta);
        let rhs = a.eval(theta) * b.eval(theta);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn coefficient_recovery_on_grid(a in sequence(5)) {
        let grid = PeriodicGrid::new(64);
        let values = grid.evaluate(&a);
        for n in -8i64..=8 {
            prop_assert!((grid.coefficient(&values, n) - a.get(n)).norm() < 1e-12);
        }
    }

    #[test]
    fn reflection_is_an_involution(a in sequence(5)) {
        prop_assert_eq!(reflect_conjugate(&reflect_conjugate(&a)), a.clone());
        let theta = 0.37;
        prop_assert!((reflect_conjugate(&a).eval(theta) - a.eval(theta).conj()).norm() < 1e-12);
    }

    #[test]
    fn power_product_matches_pointwise_formula(g in sequence(4), j in 1u32..=3) {
        let f = power_product(&g, j).unwrap();
        // conj(G)^{j-1} G^j = |G|^{2(j-1)} G
        let theta = 0.81;
        let expect = g.eval(theta).norm().powi(2 * (j as i32 - 1)) * g.eval(theta);
        prop_assert!((f.eval(theta) - expect).norm() <= 1e-9 * (1.0 + expect.norm()));
    }

    #[test]
    fn power_product_of_nonnegative_is_nonnegative(g in nonneg_sequence(4), j in 1u32..=3) {
        let f = power_product(&g, j).unwrap();
        prop_assert!(f.is_real(1e-12));
        prop_assert!(f.iter().all(|(_, v)| v.re >= 0.0));
        let lo = g.min_frequency().unwrap();
        let hi = g.max_frequency().unwrap();
        let j = j as i64;
        prop_assert_eq!(f.min_frequency().unwrap(), j * lo - (j - 1) * hi);
        prop_assert_eq!(f.max_frequency().unwrap(), j * hi - (j - 1) * lo);
    }

    #[test]
    fn convolution_power_support(g in sequence(4), j in 1u32..=3) {
        let s = g.support();
        let window = sumset(&s, j).unwrap();
        prop_assert!(convolution_power(&g, j).unwrap().support().is_subset(&window));
    }

    #[test]
    fn exact_majorant_dominates_even_norms(k in sequence(4), j in 1u32..=3) {
        let e = exact_majorant(&k);
        prop_assert!(norm_even(&e, j).unwrap() >= norm_even(&k, j).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn quadrature_agrees_with_even_norm(g in sequence(4), j in 1u32..=3) {
        let exact = norm_even(&g, j).unwrap();
        let quad = norm_p(&g, 2.0 * j as f64, &QuadratureConfig::default()).unwrap();
        prop_assert!((exact - quad).abs() <= 1e-8 * exact);
    }

    #[test]
    fn norm_is_homogeneous(g in sequence(4), s in 0.1f64..5.0, p in 1.0f64..4.0) {
        let a = norm_p_on_grid(&g.scale_real(s), p, 256);
        let b = s * norm_p_on_grid(&g, p, 256);
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
    }

    #[test]
    fn sumset_monotone_in_set(s in frequency_set(), extra in -8i64..=8, j in 1u32..=3) {
        let mut t = s.clone();
        t.insert(extra);
        prop_assert!(sumset(&s, j).unwrap().is_subset(&sumset(&t, j).unwrap()));
    }

    #[test]
    fn window_grows_with_order(s in frequency_set(), j in 1u32..=3) {
        let small = majorant_window(&s, j).unwrap();
        let big = majorant_window(&s, j + 1).unwrap();
        prop_assert!(small.is_subset(&big));
        if s.len() >= 2 {
            prop_assert!(big.len() >= small.len() + 2);
        }
        prop_assert!(s.is_subset(&small));
    }
}
