use kloptim::cr::{default_m, dynamics_check, mu_chain_slacks, run_cr, tail_lengths};
use kloptim::gda::{limit_criticality, lyapunov_decrease_check, run_prox_gda};
use kloptim::prox::ProxOperator;
use kloptim::zoo::{Bilinear, PowerNorm, SaddleConfined};
use kloptim::{CRConfig64, GDAConfig64, Matrix64, Point64, SmoothOracle, SymMatrix64, Termination};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// From any point near the strict saddle, CR reaches a global minimizer.
    #[test]
    fn saddle_escape(angle in 0.0f64..std::f64::consts::TAU, radius in 1e-4f64..0.1) {
        let x0 = Point64::from(vec![radius * angle.cos(), radius * angle.sin()]);
        let f = SaddleConfined::new(SymMatrix64::from_diag(&[-1.0, 1.0]), 1.0).unwrap().for_start(&x0);
        let cfg = CRConfig64::for_oracle(&f);
        let t = run_cr(&f, &x0, &cfg).unwrap();
        let last = t.last();
        prop_assert!(last.min_eig >= -1e-6);
        prop_assert!(last.dist <= 1e-6);
        prop_assert!(dynamics_check(&t, t.lipschitz_hess, cfg.m).all_hold());
        prop_assert!(t.records.windows(2).all(|w| w[1].f <= w[0].f + 1e-12));
    }

    #[test]
    fn tails_dominate_distances(p in prop::sample::select(vec![2.0, 3.0, 4.0]), seed in 0u64..100) {
        let x0 = Point64::from_fn(3, |i| ((seed + i as u64) as f64).sin());
        prop_assume!(x0.norm() > 0.1);
        let x0 = x0.scaled(1.0 / x0.norm());
        let f = PowerNorm::new(3, p, 1.0).unwrap();
        let t = run_cr(&f, &x0, &CRConfig64::new(default_m(f.constants().lipschitz_hess))).unwrap();
        let tails = tail_lengths(&t);
        for (d, rec) in tails.iter().zip(&t.records) {
            prop_assert!(*d >= rec.dist_to_final - 1e-12);
        }
        prop_assert!(mu_chain_slacks(&t).iter().all(|&s| s >= -1e-9));
    }

    #[test]
    fn lyapunov_decreases_with_default_rates(
        a in prop::collection::vec(-1.0f64..1.0, 4),
        mu in 0.5f64..2.0,
        w in 0.0f64..0.5,
    ) {
        let am = Matrix64::from_rows(vec![vec![a[0], a[1]], vec![a[2], a[3]]]).unwrap();
        let f = Bilinear::new(am, mu, Some(SymMatrix64::identity(2)), ProxOperator::L1 { weight: w }, 100.0).unwrap();
        let cfg = GDAConfig64::for_oracle(&f).unwrap();
        let t = run_prox_gda(&f, &Point64::from(vec![1.0, -0.5]), &Point64::zeros(2), &cfg).unwrap();
        let rep = lyapunov_decrease_check(&t, &f);
        prop_assert_eq!(rep.violations, 0);
        prop_assert!(t.records.windows(2).all(|r| r[1].h <= r[0].h + 1e-12 * (1.0 + r[0].h.abs())));
        if t.terminated_by != kloptim::gda::GDATermination::MaxIters {
            prop_assert!(limit_criticality(&f, &t.final_x) <= 1e-6);
        }
    }
}

#[test]
fn max_iters_bounds_records() {
    let f = PowerNorm::new(2, 6.0, 1.0).unwrap();
    let mut cfg = CRConfig64::new(default_m(f.constants().lipschitz_hess));
    cfg.max_iters = 25;
    let t = run_cr(&f, &Point64::from(vec![0.6, 0.8]), &cfg).unwrap();
    assert_eq!(t.terminated_by, Termination::MaxIters);
    assert_eq!(t.len(), 26);
    assert!(t.last().step_norm.is_none());
}
