use kloptim::cubic::{model_value, solve_cubic, verify_global_optimality, CubicModel};
use kloptim::linalg::sym_eig;
use kloptim::verify::grid_cubic_minimum_2d;
use kloptim::{Matrix64, Point64, SymMatrix64};
use proptest::prelude::*;

fn model() -> impl Strategy<Value = CubicModel<f64>> {
    (1usize..=10).prop_flat_map(|d| {
        (
            prop::collection::vec(-5.0f64..5.0, d),
            prop::collection::vec(-5.0f64..5.0, d * d),
            -2.0f64..2.0,
        )
            .prop_map(move |(g, h, log_m)| {
                let mut it = h.into_iter();
                let h = SymMatrix64::from_upper(d, |_, _| it.next().unwrap());
                CubicModel::new(Point64::from(g), h, 10f64.powf(log_m)).unwrap()
            })
    })
}

fn rotation(d: usize, seed: u64) -> Matrix64 {
    let a = SymMatrix64::from_upper(d, |i, j| ((seed as f64 + 3.0 * i as f64 + 7.0 * j as f64) * 0.731).sin());
    sym_eig(&a).unwrap().eigenvectors
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn certificates_hold(m in model()) {
        let sol = solve_cubic(&m, 1e-12).unwrap();
        let cert = verify_global_optimality(&m, &sol, 1e-8);
        prop_assert!(cert.passed, "{cert:?}");
        prop_assert!(cert.psd_margin >= -1e-10);
        prop_assert!(model_value(&m, &sol.step) <= 1e-12);
        prop_assert_eq!(sol.model_decrease, model_value(&m, &sol.step));
    }

    #[test]
    fn rotation_equivariance(m in model(), seed in 0u64..1000) {
        let d = m.g.dim();
        let q = rotation(d, seed);
        let rotated = CubicModel::new(q.tmatvec(&m.g), m.h.congruence(&q), m.m).unwrap();
        let a = solve_cubic(&m, 1e-12).unwrap();
        let b = solve_cubic(&rotated, 1e-12).unwrap();
        // the optimal value is invariant even when the minimizer is not unique
        let va = model_value(&m, &a.step);
        let vb = model_value(&rotated, &b.step);
        prop_assert!((va - vb).abs() <= 1e-8 * (1.0 + va.abs()));
        prop_assert!((a.lam - b.lam).abs() <= 1e-7 * (1.0 + a.lam));
        if !a.hard_case {
            prop_assert!(q.matvec(&b.step).dist(&a.step) <= 1e-6 * (1.0 + a.step.norm()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn two_dimensional_grid_oracle(g in prop::collection::vec(-2.0f64..2.0, 2), h in prop::collection::vec(-2.0f64..2.0, 3), m in 0.3f64..5.0) {
        let model = CubicModel::new(
            Point64::from(g),
            SymMatrix64::from_rows(vec![vec![h[0], h[1]], vec![h[1], h[2]]]).unwrap(),
            m,
        ).unwrap();
        let sol = solve_cubic(&model, 1e-12).unwrap();
        let hn = 2.0 * model.h.max_abs();
        let radius = (hn + (hn * hn + 2.0 * m * model.g.norm()).sqrt()) / m;
        prop_assert!(sol.step.norm() <= radius * (1.0 + 1e-9));
        let (grid, _) = grid_cubic_minimum_2d(&model, 1.1 * radius + 0.1, (1.1 * radius + 0.1) / 40.0, 4);
        prop_assert!(model_value(&model, &sol.step) <= grid + 1e-10);
    }
}

#[test]
fn planted_hard_cases() {
    for d in 2..=8 {
        for k in 0..8 {
            let q = rotation(d, 100 * d as u64 + k);
            let mut eigs: Vec<f64> = (0..d).map(|i| i as f64 * 0.5).collect();
            eigs[0] = -1.0 - k as f64 * 0.1;
            let h = SymMatrix64::from_spectrum(&q, &eigs);
            let mut g = Point64::zeros(d);
            for i in 1..d {
                g.axpy(0.01 * (i as f64), &q.column(i));
            }
            let model = CubicModel::new(g, h, 2.0).unwrap();
            let sol = solve_cubic(&model, 1e-12).unwrap();
            assert!(sol.hard_case, "d={d} k={k}");
            let cert = verify_global_optimality(&model, &sol, 1e-8);
            assert!(cert.passed, "{cert:?}");
            // λ = −λ₁ exactly in the hard case
            assert!((sol.lam + eigs[0]).abs() <= 1e-10);
        }
    }
}
