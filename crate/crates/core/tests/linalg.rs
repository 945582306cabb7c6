use approx::assert_relative_eq;
use kloptim::linalg::{min_eigenvalue, solve_shifted, spectral_norm, sym_eig};
use kloptim::verify::power_iteration_min_eig;
use kloptim::{Point64, SymMatrix64};
use proptest::prelude::*;

fn sym(d: usize, entries: &[f64]) -> SymMatrix64 {
    let mut it = entries.iter().copied().cycle();
    SymMatrix64::from_upper(d, |_, _| it.next().unwrap())
}

fn matrix() -> impl Strategy<Value = SymMatrix64> {
    (1usize..=64).prop_flat_map(|d| {
        prop::collection::vec(-10.0f64..10.0, d * (d + 1) / 2).prop_map(move |v| sym(d, &v))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_reconstructs(h in matrix()) {
        let e = sym_eig(&h).unwrap();
        let scale = 1.0f64.max(h.max_abs()) * h.dim() as f64;
        prop_assert!(e.reconstruction_error(&h) <= 1e-12 * scale);
        prop_assert!(e.orthonormality_error() <= 1e-12 * h.dim() as f64);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn spectral_norm_bounds_rayleigh_quotients(h in matrix(), seed in any::<u64>()) {
        let d = h.dim();
        let x = Point64::from_fn(d, |i| ((seed.rotate_left(i as u32) % 1000) as f64 - 499.5) / 500.0);
        prop_assume!(x.norm() > 1e-3);
        let q = h.quad_form(&x) / x.norm_sq();
        let s = spectral_norm(&h).unwrap();
        let lo = min_eigenvalue(&h).unwrap();
        prop_assert!(q.abs() <= s * (1.0 + 1e-12) + 1e-12);
        prop_assert!(q >= lo - 1e-10 * (1.0 + s));
    }

    #[test]
    fn shifted_solve_residual(h in matrix(), shift in 0.5f64..5.0) {
        let lo = min_eigenvalue(&h).unwrap();
        let sigma = shift - lo;
        let g = Point64::from_fn(h.dim(), |i| (i as f64).sin());
        let s = solve_shifted(&h, sigma, &g).unwrap();
        let mut r = h.shifted(sigma).matvec(&s);
        r.axpy(1.0, &g);
        // backward-stable bound: ‖r‖ ≲ ε·d·‖H + σI‖·‖s‖
        let scale = (h.max_abs() * h.dim() as f64 + sigma.abs()) * s.norm() + g.norm();
        prop_assert!(r.norm() <= 1e-12 * h.dim() as f64 * scale, "{} vs {}", r.norm(), scale);
    }
}

#[test]
fn power_iteration_agrees_on_planted_spectrum() {
    for d in [2, 5, 17, 40] {
        let q = sym_eig(&sym(d, &(0..d * d).map(|k| ((k * 37 % 101) as f64).cos()).collect::<Vec<_>>()))
            .unwrap()
            .eigenvectors;
        let eigs: Vec<f64> = (0..d).map(|i| -1.5 + i as f64).collect();
        let h = SymMatrix64::from_spectrum(&q, &eigs);
        assert_relative_eq!(min_eigenvalue(&h).unwrap(), -1.5, epsilon = 1e-12);
        assert_relative_eq!(power_iteration_min_eig(&h, 20_000, 1e-14), -1.5, epsilon = 1e-6);
    }
}
