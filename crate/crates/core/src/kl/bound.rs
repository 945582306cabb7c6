use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kl::fit_line;
use crate::linalg::Point;
use crate::zoo::SmoothOracle;
use crate::Scalar;

/// Fit of `log dist_Ω(x)` against `log(f(x) − f*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBoundFit {
    pub slope: f64,
    pub stderr: f64,
    /// `max dist/(f − f*)^θ` over the samples.
    pub constant: f64,
    pub theta: f64,
    pub n_points: usize,
    /// Decades spanned by the residuals.
    pub spread_decades: f64,
}

impl ErrorBoundFit {
    /// The bound `dist ≤ C·(f − f*)^θ` tolerates slopes at or above `θ`.
    pub fn consistent(&self, tol: f64) -> bool {
        self.slope >= self.theta - tol
    }
}

/// Samples with residual outside `(1e-10, lam]` are dropped; at least two
/// decades of residual spread are required.
pub fn error_bound_check<T: Scalar, O: SmoothOracle<T> + ?Sized>(
    oracle: &O,
    points: &[Point<T>],
    lam: f64,
) -> Result<ErrorBoundFit> {
    let theta = oracle
        .constants()
        .kl_theta
        .ok_or_else(|| Error::Input("error bound check needs an oracle with known theta".into()))?
        .to_f64_lossy();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut constant: f64 = 0.0;
    for p in points {
        let r = oracle.residual(p).to_f64_lossy();
        let d = oracle.solution_distance(p).to_f64_lossy();
        if r > 1e-10 && r <= lam && d > 0.0 {
            constant = constant.max(d / r.powf(theta));
            xs.push(r.ln());
            ys.push(d.ln());
        }
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread_decades = if xs.is_empty() { 0.0 } else { (hi - lo) / std::f64::consts::LN_10 };
    if spread_decades < 2.0 {
        return Err(Error::InsufficientData(format!(
            "residuals span {spread_decades:.2} decades; need at least 2"
        )));
    }
    let fit = fit_line(&xs, &ys)?;
    Ok(ErrorBoundFit { slope: fit.slope, stderr: fit.stderr, constant, theta, n_points: xs.len(), spread_decades })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use crate::zoo::{PowerNorm, Quadratic};

    fn ray(d: usize, n: i32) -> Vec<Point<f64>> {
        (0..n).map(|i| Point::from_fn(d, |j| if j == 0 { 0.9f64.powi(i) } else { 0.0 })).collect()
    }

    #[test]
    fn quartic_slope_is_theta() {
        let f = PowerNorm::<f64>::new(2, 4.0, 1.0).unwrap();
        let fit = error_bound_check(&f, &ray(2, 60), 1.0).unwrap();
        assert!((fit.slope - 0.25).abs() < 1e-12);
        assert!((fit.constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_slope_is_half() {
        let f = Quadratic::new(SymMatrix::<f64>::identity(2), Point::zeros(2)).unwrap();
        let fit = error_bound_check(&f, &ray(2, 60), 1.0).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_magnitude_is_insufficient() {
        let f = PowerNorm::<f64>::new(2, 2.0, 1.0).unwrap();
        let pts: Vec<Point<f64>> = (0..10).map(|i| Point::from(vec![(i as f64).cos() * 0.5, (i as f64).sin() * 0.5])).collect();
        assert!(matches!(error_bound_check(&f, &pts, 1.0), Err(Error::InsufficientData(_))));
    }
}
