use proptest::prelude::*;

use taxdelay::{
    simulate_terminal, InjectionProblem, LevyModel, QuadSpec, ScaleSet, SimConfig, TerminalProblem,
};

fn model() -> impl Strategy<Value = LevyModel> {
    (0.5f64..3.0, 0.2f64..3.0, 0.3f64..3.0).prop_map(|(c, l, m)| LevyModel::new(c, l, m).unwrap())
}

/// Number of sign changes of `f` on an even grid over `[0, top]`.
fn sign_changes(f: impl Fn(f64) -> f64, top: f64, n: usize) -> usize {
    let values: Vec<f64> = (0..=n).map(|i| f(top * i as f64 / n as f64)).collect();
    values.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn spectral_roots_solve_the_laplace_equation(m in model(), q in 1e-4f64..2.0) {
        let r = m.spectral_roots(q).unwrap();
        prop_assert!(((m.laplace_exponent(r.theta1) - q) / q).abs() < 1e-10);
        prop_assert!(r.theta2 < 0.0 && r.theta2 > -m.mu());
        prop_assert!(r.theta1 > 0.0);
        prop_assert!((r.a1 - r.a2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phi_increases_with_q(m in model(), q in 1e-4f64..1.0, step in 1e-3f64..1.0) {
        prop_assert!(m.phi(q + step).unwrap() > m.phi(q).unwrap());
    }

    #[test]
    fn terminal_h_crosses_zero_at_most_once(
        m in model(), q in 0.01f64..0.2, ell in 0.05f64..0.5, s in -10.0f64..3.0
    ) {
        let p = TerminalProblem::new(ScaleSet::new(m, q).unwrap(), ell, s, 1.0).unwrap();
        let r = p.optimize().unwrap();
        let top = 3.0 * r.threshold + 5.0 / p.scale().phi().max(0.2);
        let changes = sign_changes(|b| p.h_terminal(b).unwrap(), top, 200);
        prop_assert!(changes <= 1);
        prop_assert_eq!(changes == 1, !r.boundary_case);
    }

    #[test]
    fn injection_h_crosses_zero_at_most_once(
        m in model(), q in 0.01f64..0.2, ell in 0.05f64..0.5, varphi in 1.05f64..4.0
    ) {
        let p = InjectionProblem::new(ScaleSet::new(m, q).unwrap(), ell, varphi, 1.0).unwrap();
        let r = p.optimize().unwrap();
        let top = 3.0 * r.threshold + 5.0 / p.scale().phi().max(0.2);
        let changes = sign_changes(|a| p.h_bar(a).unwrap(), top, 200);
        prop_assert!(changes <= 1);
        prop_assert_eq!(changes == 1, !r.boundary_case);
    }

    #[test]
    fn threshold_does_not_depend_on_start(
        q in 0.01f64..0.2, ell in 0.05f64..0.5, s in -8.0f64..0.0, x0 in 0.0f64..6.0
    ) {
        let scale = ScaleSet::new(LevyModel::new(1.2, 1.0, 1.0).unwrap(), q).unwrap();
        let a = TerminalProblem::new(scale, ell, s, 0.0).unwrap().optimize().unwrap();
        let b = TerminalProblem::new(scale, ell, s, x0).unwrap().optimize().unwrap();
        prop_assert!((a.threshold - b.threshold).abs() < 1e-9);
        let a = InjectionProblem::new(scale, ell, 1.5, 0.0).unwrap().optimize().unwrap();
        let b = InjectionProblem::new(scale, ell, 1.5, x0).unwrap().optimize().unwrap();
        prop_assert!((a.threshold - b.threshold).abs() < 1e-9);
    }

    #[test]
    fn quadrature_is_stable_under_tighter_tolerance(
        q in 0.01f64..0.2, ell in 0.05f64..0.5, b in 0.0f64..5.0
    ) {
        let scale = ScaleSet::new(LevyModel::new(1.2, 1.0, 1.0).unwrap(), q).unwrap();
        let loose = QuadSpec { rel_tol: 1e-8, ..QuadSpec::default() };
        let tight = QuadSpec { rel_tol: 5e-9, ..QuadSpec::default() };
        let t = TerminalProblem::new(scale, ell, -3.0, 1.0).unwrap();
        let (u, v) = (t.with_quad(loose).psi(b).unwrap(), t.with_quad(tight).psi(b).unwrap());
        prop_assert!((u - v).abs() <= 1e-8 * u.abs().max(1.0));
        let i = InjectionProblem::new(scale, ell, 1.5, 1.0).unwrap();
        let (u, v) = (i.with_quad(loose).h_bar(b).unwrap(), i.with_quad(tight).h_bar(b).unwrap());
        prop_assert!((u - v).abs() <= 1e-8 * u.abs().max(1.0));
    }

    #[test]
    fn scale_functions_are_positive_and_increasing(m in model(), q in 1e-3f64..1.0, x in 0.0f64..20.0) {
        let s = ScaleSet::new(m, q).unwrap();
        prop_assert!(s.w(x) > 0.0 && s.w1(x) > 0.0);
        prop_assert!(s.z(x) >= 1.0 && s.z1(x) >= 0.0);
        prop_assert!(s.w(x + 0.5) > s.w(x));
    }
}

fn terminal_case() -> TerminalProblem {
    let scale = ScaleSet::new(LevyModel::new(1.2, 1.0, 1.0).unwrap(), 0.05).unwrap();
    TerminalProblem::new(scale, 0.2, -5.0, 1.0).unwrap()
}

#[test]
fn stderr_shrinks_like_root_n() {
    let p = terminal_case();
    let small = simulate_terminal(&p, 1.0, &SimConfig::new(10_000, 400.0, 3)).unwrap();
    let large = simulate_terminal(&p, 1.0, &SimConfig::new(20_000, 400.0, 4)).unwrap();
    let ratio = large.stderr / small.stderr;
    assert!((ratio - 0.5f64.sqrt()).abs() < 0.05, "ratio {ratio}");
}

#[test]
fn simulation_is_identical_across_thread_counts() {
    let p = terminal_case();
    let cfg = SimConfig::new(5_000, 400.0, 11);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_terminal(&p, 2.0, &cfg).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one.mean.to_bits(), four.mean.to_bits());
    assert_eq!(one.stderr.to_bits(), four.stderr.to_bits());
}
