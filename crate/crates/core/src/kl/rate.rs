use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kl::{fit_line, PredictedRate, NOISE_FLOOR};

/// Shortest window a fit is attempted on.
pub const MIN_TAIL: usize = 4;
/// Margin by which the linear model wins ties.
const LINEAR_PREFERENCE: f64 = 1.05;
const MONOTONE_SLACK: f64 = 1e-12;
const SUPERLINEAR_BAND: (f64, f64) = (1e-14, 1e-1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateClass {
    FiniteStep,
    Superlinear,
    Linear,
    Sublinear,
}

impl fmt::Display for RateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RateClass::FiniteStep => "finite_step",
            RateClass::Superlinear => "superlinear",
            RateClass::Linear => "linear",
            RateClass::Sublinear => "sublinear",
        })
    }
}

/// Mean squared log-error of each candidate model on the fit window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelResiduals {
    pub linear: f64,
    pub sublinear: f64,
    /// Absent when fewer than three window entries are below 1.
    pub superlinear: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub class: RateClass,
    /// `e_{k+1}/e_k` for the linear class.
    pub linear_ratio: Option<f64>,
    /// `p` in `e_k ≈ C·k^{−p}`.
    pub sublinear_exponent: Option<f64>,
    /// `q` in `log e_{k+1} ≈ q·log e_k`.
    pub superlinear_order: Option<f64>,
    pub burn_in: usize,
    /// Entries in the fit window.
    pub window: usize,
    /// Mean squared log-error of the chosen model.
    pub fit_residual: f64,
    /// Index of the first exact zero for the finite-step class.
    pub finite_step_at: Option<usize>,
    pub residuals: Option<ModelResiduals>,
    pub predicted: Option<PredictedRate>,
}

impl RateReport {
    pub fn with_prediction(mut self, predicted: PredictedRate) -> Self {
        self.predicted = Some(predicted);
        self
    }

    /// Whether the observed class equals the predicted one.
    pub fn matches_prediction(&self) -> Option<bool> {
        self.predicted.map(|p| p.class == self.class)
    }

    /// The fitted parameter of the class (ratio, exponent or order).
    pub fn parameter(&self) -> Option<f64> {
        match self.class {
            RateClass::FiniteStep => None,
            RateClass::Linear => self.linear_ratio,
            RateClass::Sublinear => self.sublinear_exponent,
            RateClass::Superlinear => self.superlinear_order,
        }
    }
}

/// `max(10, ⌊n/5⌋)`, lowered so at least [`MIN_TAIL`] entries remain.
pub fn default_burn_in(n_valid: usize) -> usize {
    10.max(n_valid / 5).min(n_valid.saturating_sub(MIN_TAIL))
}

/// Classifies a nonnegative, nonincreasing error sequence.
///
/// An exact zero that follows an entry above the noise floor is a
/// finite-step termination. Otherwise the sequence is cut at its first
/// entry at or below [`NOISE_FLOOR`], the burn-in is dropped, and three
/// models are fitted in log space:
///
/// * linear: `log e_k` against `k`
/// * sublinear: `log e_k` against `log(k+1)`
/// * superlinear: `log(−log e_k)` against `k` (entries below 1)
///
/// The smallest mean squared error in `log e` wins, with a 5% margin in
/// favour of the linear model.
pub fn classify_rate(errors: &[f64], burn_in: Option<usize>) -> Result<RateReport> {
    if errors.iter().any(|e| !e.is_finite() || *e < 0.0) {
        return Err(Error::Input("error sequence must be finite and nonnegative".into()));
    }
    let scale = errors.iter().copied().fold(0.0, f64::max);
    if let Some(i) = (1..errors.len()).find(|&i| errors[i] > errors[i - 1] + MONOTONE_SLACK * scale) {
        return Err(Error::Input(format!(
            "error sequence increases at index {i} ({} -> {})",
            errors[i - 1],
            errors[i]
        )));
    }
    if let Some(z) = errors.iter().position(|&e| e == 0.0) {
        if z == 0 || errors[z - 1] > NOISE_FLOOR {
            return Ok(RateReport {
                class: RateClass::FiniteStep,
                linear_ratio: None,
                sublinear_exponent: None,
                superlinear_order: None,
                burn_in: 0,
                window: z + 1,
                fit_residual: 0.0,
                finite_step_at: Some(z),
                residuals: None,
                predicted: None,
            });
        }
    }
    let n_valid = errors.iter().position(|&e| e <= NOISE_FLOOR).unwrap_or(errors.len());
    let k0 = burn_in.unwrap_or_else(|| default_burn_in(n_valid));
    if n_valid < k0 + MIN_TAIL {
        return Err(Error::InsufficientData(format!(
            "{} entries above the noise floor after a burn-in of {k0}; need {MIN_TAIL}",
            n_valid.saturating_sub(k0)
        )));
    }
    let idx: Vec<f64> = (k0..n_valid).map(|k| k as f64).collect();
    let logs: Vec<f64> = errors[k0..n_valid].iter().map(|e| e.ln()).collect();
    if logs.iter().all(|&l| l == logs[0]) {
        return Err(Error::Degenerate("error sequence is constant on the fit window".into()));
    }
    let mse = |pred: &dyn Fn(usize) -> f64| {
        logs.iter().enumerate().map(|(i, l)| (l - pred(i)).powi(2)).sum::<f64>() / logs.len() as f64
    };

    let lin = fit_line(&idx, &logs)?;
    let lin_err = mse(&|i| lin.predict(idx[i]));
    let log_idx: Vec<f64> = idx.iter().map(|k| (k + 1.0).ln()).collect();
    let sub = fit_line(&log_idx, &logs)?;
    let sub_err = mse(&|i| sub.predict(log_idx[i]));

    let below_one: Vec<usize> = (0..logs.len()).filter(|&i| logs[i] < 0.0).collect();
    let sup = if below_one.len() >= 3 {
        let xs: Vec<f64> = below_one.iter().map(|&i| idx[i]).collect();
        let ys: Vec<f64> = below_one.iter().map(|&i| (-logs[i]).ln()).collect();
        fit_line(&xs, &ys).ok()
    } else {
        None
    };
    let sup_err = sup.map(|f| mse(&|i| -f.predict(idx[i]).exp()));

    let best = sup_err.map_or(lin_err.min(sub_err), |s| lin_err.min(sub_err).min(s));
    let class = if lin_err <= LINEAR_PREFERENCE * best + 1e-24 {
        RateClass::Linear
    } else if sup_err == Some(best) {
        RateClass::Superlinear
    } else {
        RateClass::Sublinear
    };
    let fit_residual = match class {
        RateClass::Linear => lin_err,
        RateClass::Sublinear => sub_err,
        _ => best,
    };
    Ok(RateReport {
        class,
        linear_ratio: (class == RateClass::Linear).then(|| lin.slope.exp()),
        sublinear_exponent: (class == RateClass::Sublinear).then_some(-sub.slope),
        superlinear_order: if class == RateClass::Superlinear { sup.map(|f| f.slope.exp()) } else { None },
        burn_in: k0,
        window: logs.len(),
        fit_residual,
        finite_step_at: None,
        residuals: Some(ModelResiduals { linear: lin_err, sublinear: sub_err, superlinear: sup_err }),
        predicted: None,
    })
}

/// Median of `log e_{k+1} / log e_k` over the longest run of consecutive,
/// strictly decreasing entries in `(1e-14, 1e-1]`; at least four are needed.
pub fn superlinear_order(errors: &[f64]) -> Result<f64> {
    let (lo, hi) = SUPERLINEAR_BAND;
    let in_band = |e: f64| e > lo && e <= hi;
    let mut best: (usize, usize) = (0, 0);
    let mut start = None;
    for i in 0..=errors.len() {
        let extends = i < errors.len()
            && in_band(errors[i])
            && start.is_some_and(|_| errors[i] < errors[i - 1]);
        match (start, extends) {
            (Some(_), true) => {}
            (Some(s), false) => {
                if i - s >= best.1 - best.0 {
                    best = (s, i);
                }
                start = (i < errors.len() && in_band(errors[i])).then_some(i);
            }
            (None, _) => start = (i < errors.len() && in_band(errors[i])).then_some(i),
        }
    }
    let run = &errors[best.0..best.1];
    if run.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "superlinear order needs 4 decreasing entries in (1e-14, 1e-1], found {}",
            run.len()
        )));
    }
    let mut ratios: Vec<f64> = run.windows(2).map(|w| w[1].ln() / w[0].ln()).collect();
    ratios.sort_by(f64::total_cmp);
    let m = ratios.len();
    Ok(if m % 2 == 1 { ratios[m / 2] } else { (ratios[m / 2 - 1] + ratios[m / 2]) / 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_is_linear() {
        let e: Vec<f64> = (0..40).map(|k| 0.5f64.powi(k)).collect();
        let r = classify_rate(&e, None).unwrap();
        assert_eq!(r.class, RateClass::Linear);
        assert!((r.linear_ratio.unwrap() - 0.5).abs() < 0.01);
        assert!(r.sublinear_exponent.is_none() && r.superlinear_order.is_none());
    }

    #[test]
    fn power_law_is_sublinear() {
        let e: Vec<f64> = (1..=200).map(|k| (k as f64).powi(-8)).collect();
        let r = classify_rate(&e, None).unwrap();
        assert_eq!(r.class, RateClass::Sublinear);
        assert!((r.sublinear_exponent.unwrap() - 8.0).abs() < 0.2);
    }

    #[test]
    fn doubly_exponential_is_superlinear() {
        let e: Vec<f64> = (0..5).map(|k| (-(2f64.powi(k))).exp()).collect();
        let r = classify_rate(&e, Some(0)).unwrap();
        assert_eq!(r.class, RateClass::Superlinear);
        assert!((r.superlinear_order.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn exact_zero_is_finite_step() {
        let r = classify_rate(&[1.0, 0.5, 0.1, 0.0, 0.0], None).unwrap();
        assert_eq!(r.class, RateClass::FiniteStep);
        assert_eq!(r.finite_step_at, Some(3));
        // a zero reached from round-off level is not a finite-step event
        let mut e: Vec<f64> = (0..30).map(|k| 0.3f64.powi(k)).collect();
        e.push(0.0);
        assert_eq!(classify_rate(&e, None).unwrap().class, RateClass::Linear);
    }

    #[test]
    fn rejects_bad_sequences() {
        assert!(matches!(classify_rate(&[1.0, 2.0, 0.5, 0.1, 0.05], None), Err(Error::Input(_))));
        assert!(matches!(classify_rate(&[1.0, -0.1], None), Err(Error::Input(_))));
        assert!(matches!(classify_rate(&[0.5; 30], None), Err(Error::Degenerate(_))));
        assert!(matches!(classify_rate(&[1.0, 0.5, 0.25], None), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn burn_in_defaults() {
        assert_eq!(default_burn_in(100), 20);
        assert_eq!(default_burn_in(30), 10);
        assert_eq!(default_burn_in(12), 8);
        assert_eq!(default_burn_in(3), 0);
    }

    #[test]
    fn order_of_squaring_sequence() {
        assert!((superlinear_order(&[1e-1, 1e-2, 1e-4, 1e-8]).unwrap() - 2.0).abs() < 1e-12);
        assert!(superlinear_order(&[0.5, 0.25, 0.125]).is_err());
        // only the longest band run counts
        let e = [1.0, 1e-1, 1e-2, 1e-4, 1e-8, 1e-16, 0.0];
        assert!((superlinear_order(&e).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn halving_sequence_has_order_near_one() {
        let e: Vec<f64> = (4..40).map(|k| 0.5f64.powi(k)).collect();
        let q = superlinear_order(&e).unwrap();
        assert!(q > 1.0 && q < 1.1);
    }
}
