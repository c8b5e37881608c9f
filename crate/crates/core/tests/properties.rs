use powreg_core::data::synth_instance;
use powreg_core::oracle::brute_force_threshold;
use powreg_core::solver::{objective_value, penalty_value, solve, solve_monitored, SolveConfig};
use powreg_core::threshold::{alpha, omega_zero_bound, scalar_objective, threshold, PenaltyPoint};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = PenaltyPoint> {
    (0.01f64..6.0, 0.05f64..=2.0).prop_map(|(w, q)| PenaltyPoint::new(w, q).unwrap())
}

fn near_boundary(p: PenaltyPoint, b: f64) -> bool {
    p.q() <= 1.0 && (b.abs() - alpha(p).unwrap()).abs() < 1e-3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn odd_in_b(p in point(), b in -8.0f64..8.0) {
        prop_assert_eq!(threshold(p, -b).unwrap(), -threshold(p, b).unwrap());
    }

    #[test]
    fn shrinks_toward_zero_with_sign(p in point(), b in -8.0f64..8.0) {
        let h = threshold(p, b).unwrap();
        prop_assert!(h.abs() <= b.abs());
        prop_assert!(h == 0.0 || h.signum() == b.signum());
    }

    #[test]
    fn beats_every_probe(p in point(), b in -8.0f64..8.0, probe in -10.0f64..10.0) {
        prop_assume!(!near_boundary(p, b));
        let h = threshold(p, b).unwrap();
        let f = scalar_objective(p, b, h);
        prop_assert!(f <= scalar_objective(p, b, probe) + 1e-10 * (1.0 + f.abs()));
        prop_assert!(f <= scalar_objective(p, b, 0.0) + 1e-12);
    }

    #[test]
    fn agrees_with_grid_oracle(p in point(), b in -6.0f64..6.0) {
        prop_assume!(!near_boundary(p, b));
        let h = threshold(p, b).unwrap();
        let oracle = brute_force_threshold(p, b, b.abs() + 1.0, 20_000);
        prop_assert!((h - oracle).abs() < 1e-4, "h={} oracle={}", h, oracle);
    }

    #[test]
    fn zero_exactly_below_bound(q in 0.05f64..=1.0, b in 0.1f64..6.0, f in 0.5f64..2.0) {
        prop_assume!((f - 1.0).abs() > 1e-4);
        let bound = omega_zero_bound(q, b).unwrap();
        let h = threshold(PenaltyPoint::new(f * bound, q).unwrap(), b).unwrap();
        prop_assert_eq!(h == 0.0, f > 1.0);
    }

    #[test]
    fn zero_set_grows_with_omega(q in 0.05f64..=1.0, b in -6.0f64..6.0, w in 0.01f64..6.0, dw in 0.0f64..3.0) {
        let small = threshold(PenaltyPoint::new(w, q).unwrap(), b).unwrap();
        let large = threshold(PenaltyPoint::new(w + dw, q).unwrap(), b).unwrap();
        prop_assert!(small != 0.0 || large == 0.0);
        prop_assert!(large.abs() <= small.abs() * (1.0 + 1e-12));
    }

    #[test]
    fn zero_set_grows_as_q_falls(q in 0.06f64..=1.0, dq in 0.0f64..0.5, b in -6.0f64..6.0, w in 0.01f64..6.0) {
        let lower_q = (q - dq).max(0.05);
        let hi = threshold(PenaltyPoint::new(w, q).unwrap(), b).unwrap();
        let lo = threshold(PenaltyPoint::new(w, lower_q).unwrap(), b).unwrap();
        prop_assert!(hi != 0.0 || lo == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn descent_never_rises(seed in 0u64..1000, w in 0.05f64..3.0, q in 0.1f64..=2.0) {
        let data = synth_instance(seed, 30, 8, 3, 0.4, 1.0).unwrap();
        let prob = &data.problem;
        let p = PenaltyPoint::new(w, q).unwrap();
        let start = vec![0.3; prob.p()];
        let mut last = objective_value(prob, &start, p).unwrap();
        let mut worst = f64::NEG_INFINITY;
        solve_monitored(prob, p, &start, &SolveConfig::default(), |ev| {
            let now = 0.5 * ev.residual.iter().map(|r| r * r).sum::<f64>() + penalty_value(ev.beta, p);
            worst = worst.max(now - last);
            last = now;
        }).unwrap();
        prop_assert!(worst <= 1e-12, "objective rose by {}", worst);
    }

    #[test]
    fn convex_solutions_ignore_ordering(seed in 0u64..1000, w in 0.05f64..3.0, q in 1.0f64..=2.0, shuffle in 0u64..1000) {
        let data = synth_instance(seed, 30, 6, 3, 0.4, 1.0).unwrap();
        let prob = &data.problem;
        let p = PenaltyPoint::new(w, q).unwrap();
        let zero = vec![0.0; prob.p()];
        let base = solve(prob, p, &zero, &SolveConfig::default()).unwrap();
        let perm = powreg_core::bench::ordering_from_seed(prob.p(), shuffle);
        let other = solve(prob, p, &zero, &SolveConfig::default().with_ordering(perm)).unwrap();
        prop_assert!((base.objective - other.objective).abs() <= 1e-9 * (1.0 + base.objective));
        if q > 1.0 {
            for (a, b) in base.beta.iter().zip(&other.beta) {
                prop_assert!((a - b).abs() <= 1e-6);
            }
        }
    }
}
