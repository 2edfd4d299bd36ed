use majorant_core::dual::{
    dual_gradient, dual_objective, dual_pipeline, kkt_report, random_feasible_start,
    rescale_to_conjugate, solve_dual_from, SolverConfig, StepRule,
};
use majorant_core::primal::{
    cross_validate, solve_primal, solve_primal_problem, MajorantMode, PrimalProblem,
};
use majorant_core::spectral::{norm_p, power_product};
use majorant_core::verify::{brute_oracle, verify_conjugate, OracleConfig, REPORT_TOL};
use majorant_core::{CoefficientSequence, Complex64, ExponentPair, QuadratureConfig};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sequence() -> impl Strategy<Value = CoefficientSequence> {
    prop::collection::btree_map(0i64..=4, (0.2f64..2.0, 0.0f64..6.28), 1..=3).prop_map(|m| {
        CoefficientSequence::from_pairs(
            m.into_iter()
                .map(|(n, (r, phase))| (n, Complex64::from_polar(r, phase))),
        )
    })
}

fn real(pairs: &[(i64, f64)]) -> CoefficientSequence {
    CoefficientSequence::from_real(pairs.iter().copied())
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 16,
        rng_seed: RngSeed::Fixed(0x5eed0001),
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn dual_restarts_agree(f in sequence(), j in 2u32..=3, seed in 0u64..1000) {
        let cfg = SolverConfig::default();
        let (a, _) = dual_pipeline(&f, j, &cfg).unwrap();
        let start = random_feasible_start(&f, seed).unwrap();
        let b = solve_dual_from(&f, j, &cfg, &start).unwrap();
        prop_assert!(a.converged && b.converged);
        prop_assert!((a.k - b.k).abs() <= 1e-7 * a.k);
    }

    #[test]
    fn minimal_norm_bounded_by_input_norm(f in sequence(), j in 2u32..=3) {
        let p = ExponentPair::special(j).unwrap().p();
        let (sol, res) = dual_pipeline(&f, j, &SolverConfig::default()).unwrap();
        let norm_f = norm_p(&f, p, &QuadratureConfig::default()).unwrap();
        prop_assert!(sol.k * norm_f >= 1.0 - 1e-8);
        prop_assert!((res.norm_f_p * sol.k - 1.0).abs() < 1e-6);
        prop_assert!(res.g.support().is_subset(&f.support()));
        prop_assert!(kkt_report(&f, &res).passes(1e-5));
        prop_assert!(verify_conjugate(&f, &res.g, j, REPORT_TOL).unwrap().all_passed());
    }

    #[test]
    fn majorant_is_phase_blind_and_homogeneous(f in sequence(), s in 0.2f64..5.0, phase in 0.0f64..6.28) {
        let cfg = SolverConfig::default();
        let (_, base) = dual_pipeline(&f, 2, &cfg).unwrap();
        let g = f.scale(Complex64::from_polar(s, phase));
        let (_, scaled) = dual_pipeline(&g, 2, &cfg).unwrap();
        let diff = scaled.f_major.max_abs_diff(&base.f_major.scale_real(s));
        prop_assert!(diff <= 1e-6 * s.max(1.0), "diff {}", diff);
    }

    #[test]
    fn primal_matches_dual(f in sequence(), j in 2u32..=3) {
        let r = cross_validate(&f, j, &SolverConfig::default(), &QuadratureConfig::default());
        prop_assert!(r.is_ok(), "{:?}", r.err());
        let r = r.unwrap();
        prop_assert!((r.full.norm_p * r.dual.k - 1.0).abs() < 1e-6);
    }
}

// Inputs that once stalled the solvers.
#[test]
fn dual_multiplier_ignores_empty_coordinates() {
    let f = real(&[(0, 0.2), (1, 1.8863834591587672), (2, 0.9645933392999707)]);
    let start = random_feasible_start(&f, 0).unwrap();
    let sol = solve_dual_from(&f, 2, &SolverConfig::default(), &start).unwrap();
    assert!(sol.converged, "gap {}", sol.gap);
}

#[test]
fn full_primal_with_degenerate_bounds_converges() {
    let f = real(&[(0, 1.900733428094499), (2, 1.8824885120005632), (4, 0.2)]);
    let cfg = SolverConfig::default();
    let quad = QuadratureConfig::default();
    let sol = solve_primal(&f, 3, MajorantMode::Full, &cfg, &quad).unwrap();
    assert!(sol.converged, "stationarity {}", sol.stationarity);
}

#[test]
fn dual_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..20 {
        let support: Vec<i64> = vec![0, 1, 3, 7][..2 + trial % 3].to_vec();
        let x: Vec<f64> = support.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
        let j = 2 + (trial % 2) as u32;
        let grad = dual_gradient(&support, &x, j);
        for i in 0..x.len() {
            let h = 1e-6;
            let (mut up, mut down) = (x.clone(), x.clone());
            up[i] += h;
            down[i] -= h;
            let fd =
                (dual_objective(&support, &up, j) - dual_objective(&support, &down, j)) / (2.0 * h);
            assert!(
                (fd - grad[i]).abs() <= 1e-5 * grad[i].abs().max(1.0),
                "{fd} vs {}",
                grad[i]
            );
        }
    }
}

#[test]
fn primal_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let f = real(&[(0, 1.0), (1, 0.7), (3, 0.4)]);
    let quad = QuadratureConfig::default();
    for mode in [MajorantMode::Partial, MajorantMode::Full] {
        let problem = PrimalProblem::new(&f, 2, mode, &quad).unwrap();
        for _ in 0..10 {
            let y: Vec<f64> = problem
                .lower_bounds()
                .iter()
                .map(|&lo| lo.max(0.0) + rng.gen_range(0.0..0.5))
                .collect();
            let grad = problem.gradient(&y);
            for i in 0..y.len() {
                let h = 1e-6;
                let (mut up, mut down) = (y.clone(), y.clone());
                up[i] += h;
                down[i] -= h;
                let fd = (problem.objective(&up) - problem.objective(&down)) / (2.0 * h);
                assert!(
                    (fd - grad[i]).abs() <= 1e-5 * grad[i].abs().max(1.0),
                    "{fd} vs {}",
                    grad[i]
                );
            }
        }
    }
}

#[test]
fn primal_is_independent_of_start() {
    let f = real(&[(0, 1.0), (2, 0.5), (3, 0.8)]);
    let quad = QuadratureConfig::default();
    let cfg = SolverConfig::default();
    let problem = PrimalProblem::new(&f, 2, MajorantMode::Full, &quad).unwrap();
    let reference = solve_primal(&f, 2, MajorantMode::Full, &cfg, &quad).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..3 {
        let start: Vec<f64> = problem
            .lower_bounds()
            .iter()
            .map(|&lo| lo + rng.gen_range(0.0..1.0))
            .collect();
        let sol = solve_primal_problem(&problem, &cfg, &quad, &start).unwrap();
        assert!(sol.converged);
        assert!(sol.f_major.max_abs_diff(&reference.f_major) < 1e-5);
    }
}

#[test]
fn fixed_step_rule_reaches_the_same_dual_optimum() {
    let f = real(&[(0, 1.0), (1, 2.0), (4, 0.5)]);
    let fixed = SolverConfig {
        step_rule: StepRule::Fixed,
        fixed_step: 0.02,
        ..Default::default()
    };
    let (a, _) = dual_pipeline(&f, 2, &fixed).unwrap();
    let (b, _) = dual_pipeline(&f, 2, &SolverConfig::default()).unwrap();
    assert!((a.k - b.k).abs() < 1e-7 * b.k);
}

#[test]
fn oracle_agrees_on_flagship() {
    let f = real(&[(0, 1.0), (1, 1.0)]);
    let oracle = brute_oracle(&f, 2, &OracleConfig::default()).unwrap();
    let primal = solve_primal(
        &f,
        2,
        MajorantMode::Full,
        &SolverConfig::default(),
        &QuadratureConfig::default(),
    )
    .unwrap();
    assert!(oracle.max_abs_diff(&primal.f_major) < 1e-5, "{oracle:?}");
}

#[test]
fn oracle_fixes_own_majorant() {
    // the only own-majorant inputs with a window this small are monomials
    let h = real(&[(3, 0.6)]);
    let f = power_product(&h, 2).unwrap();
    let oracle = brute_oracle(&f, 2, &OracleConfig::default()).unwrap();
    assert!(oracle.max_abs_diff(&f) < 1e-6, "{oracle:?}");
}

#[test]
fn two_and_three_term_inputs_improve_strictly() {
    let quad = QuadratureConfig::default();
    for (f, j) in [
        (real(&[(0, 1.0), (1, 1.0)]), 2),
        (real(&[(0, 2.0), (3, 1.0)]), 3),
        (real(&[(0, 1.0), (1, 1.0), (3, 1.0)]), 2),
        (real(&[(-1, 0.5), (0, 1.0), (2, 1.5)]), 2),
    ] {
        let p = ExponentPair::special(j).unwrap().p();
        let (_, res) = dual_pipeline(&f, j, &SolverConfig::default()).unwrap();
        let norm_f = norm_p(&f, p, &quad).unwrap();
        assert!(res.norm_f_p < norm_f - 1e-6, "{} vs {norm_f}", res.norm_f_p);
    }
}

#[test]
fn wrong_scaling_is_rejected() {
    let f = real(&[(0, 1.0), (1, 1.0)]);
    let (mut sol, _) = dual_pipeline(&f, 2, &SolverConfig::default()).unwrap();
    sol.k *= 1.1;
    assert!(rescale_to_conjugate(&sol, &f, 2).is_err());
}
