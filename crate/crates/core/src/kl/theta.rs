use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kl::{fit_line, NOISE_FLOOR};

/// Lower clamp for `θ̂` when the fitted slope is at most 1.
pub const THETA_FLOOR: f64 = 1e-6;
const MIN_PAIRS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub theta_hat: f64,
    /// Slope of `log r` against `log ‖∇f‖`.
    pub slope: f64,
    pub stderr: f64,
    pub n_points: usize,
    pub burn_in: usize,
    /// Set when the slope is at most 1 and `θ̂` was clamped.
    pub degenerate: bool,
}

/// Estimates `θ` from `(r_k, ‖∇f(x_k)‖)` pairs through
/// `r ≈ C·‖∇f‖^{1/(1−θ)}`, i.e. `θ̂ = 1 − 1/slope`.
///
/// Pairs with `r ≤ 1e-13` or a zero gradient are dropped. `burn_in = None`
/// skips `max(10, n/5)` leading valid pairs but never leaves fewer than 10.
pub fn estimate_theta(pairs: &[(f64, f64)], burn_in: Option<usize>) -> Result<ThetaEstimate> {
    let valid: Vec<(f64, f64)> = pairs
        .iter()
        .copied()
        .filter(|&(r, g)| r > NOISE_FLOOR && g > 0.0 && r.is_finite() && g.is_finite())
        .collect();
    let k0 = burn_in.unwrap_or_else(|| 10.max(valid.len() / 5).min(valid.len().saturating_sub(MIN_PAIRS)));
    if valid.len() < k0 + MIN_PAIRS {
        return Err(Error::InsufficientData(format!(
            "theta estimation needs {MIN_PAIRS} pairs above the noise floor after burn-in, got {}",
            valid.len().saturating_sub(k0)
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = valid[k0..].iter().map(|&(r, g)| (g.ln(), r.ln())).unzip();
    let fit = fit_line(&xs, &ys)?;
    let degenerate = !(fit.slope > 1.0);
    let theta_hat = if degenerate { THETA_FLOOR } else { (1.0 - 1.0 / fit.slope).clamp(THETA_FLOOR, 1.0) };
    Ok(ThetaEstimate { theta_hat, slope: fit.slope, stderr: fit.stderr, n_points: xs.len(), burn_in: k0, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(p: i32) -> Vec<(f64, f64)> {
        // f = ‖x‖^p along a ray: r = t^p, ‖∇f‖ = p·t^{p−1}
        (1..=60).map(|i| 1.1f64.powi(-i)).map(|t| (t.powi(p), p as f64 * t.powi(p - 1))).collect()
    }

    #[test]
    fn quartic_and_quadratic() {
        let q = estimate_theta(&samples(4), None).unwrap();
        assert!((q.theta_hat - 0.25).abs() < 0.01 && !q.degenerate);
        let h = estimate_theta(&samples(2), None).unwrap();
        assert!((h.theta_hat - 0.5).abs() < 0.01);
    }

    #[test]
    fn unit_slope_is_degenerate() {
        let pairs: Vec<(f64, f64)> = (1..40).map(|i| (0.9f64.powi(i), 0.9f64.powi(i))).collect();
        let e = estimate_theta(&pairs, None).unwrap();
        assert!(e.degenerate);
        assert_eq!(e.theta_hat, THETA_FLOOR);
    }

    #[test]
    fn too_few_pairs() {
        let pairs: Vec<(f64, f64)> = samples(2).into_iter().take(9).collect();
        assert!(matches!(estimate_theta(&pairs, None), Err(Error::InsufficientData(_))));
        let floor: Vec<(f64, f64)> = (0..50).map(|_| (1e-15, 1e-3)).collect();
        assert!(estimate_theta(&floor, Some(0)).is_err());
    }
}
