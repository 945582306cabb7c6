use kloptim::kl::{classify_rate, estimate_theta, predict_rates, Family, RateClass};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn geometric_round_trip(q in 0.05f64..0.95, c in 1e-3f64..1e3) {
        let e: Vec<f64> = (0..400).map(|k| c * q.powi(k)).take_while(|&v| v > 1e-13).collect();
        prop_assume!(e.len() >= 15);
        let r = classify_rate(&e, None).unwrap();
        prop_assert_eq!(r.class, RateClass::Linear);
        prop_assert!((r.linear_ratio.unwrap() - q).abs() <= 0.1 * q);
    }

    #[test]
    fn power_law_round_trip(p in 0.3f64..10.0, c in 0.1f64..10.0) {
        let e: Vec<f64> = (0..400).map(|k| c * ((k + 1) as f64).powf(-p)).collect();
        let r = classify_rate(&e, None).unwrap();
        prop_assert_eq!(r.class, RateClass::Sublinear);
        prop_assert!((r.sublinear_exponent.unwrap() - p).abs() <= 0.1 * p);
    }

    #[test]
    fn theta_is_scale_invariant(theta in 0.1f64..0.9, c in 1e-3f64..1e3) {
        let pairs: Vec<(f64, f64)> = (0..40)
            .map(|i| 0.8f64.powi(i))
            .map(|g| (c * g.powf(1.0 / (1.0 - theta)), g))
            .collect();
        let est = estimate_theta(&pairs, None).unwrap();
        prop_assert!((est.theta_hat - theta).abs() <= 1e-6);
    }

    /// Faster geometry never predicts a slower rate.
    #[test]
    fn predictions_are_monotone(a in 0.01f64..0.99, b in 0.01f64..0.99) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let rank = |c: RateClass| match c {
            RateClass::Sublinear => 0,
            RateClass::Linear => 1,
            RateClass::Superlinear => 2,
            RateClass::FiniteStep => 3,
        };
        for fam in Family::ALL {
            let (x, y) = (predict_rates(lo, fam).unwrap(), predict_rates(hi, fam).unwrap());
            prop_assert!(rank(x.class) <= rank(y.class));
            if x.class == y.class {
                if let (Some(p), Some(q)) = (x.exponent, y.exponent) {
                    prop_assert!(p <= q + 1e-12);
                }
                if let (Some(p), Some(q)) = (x.order, y.order) {
                    prop_assert!(p <= q + 1e-12);
                }
            }
        }
    }
}

#[test]
fn finite_step_and_too_short() {
    let r = classify_rate(&[2.0, 1.0, 0.5, 0.0, 0.0], None).unwrap();
    assert_eq!(r.class, RateClass::FiniteStep);
    assert_eq!(r.finite_step_at, Some(3));
    assert!(classify_rate(&[1.0, 0.5], None).is_err());
}
