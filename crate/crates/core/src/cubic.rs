//! Global solver for the cubic-regularized model
//! `m(s) = ⟨g,s⟩ + ½sᵀHs + (M/6)‖s‖³`.
//!
//! `s` is a global minimizer iff `(H + λI)s = −g`, `λ = (M/2)‖s‖` and
//! `H + λI ⪰ 0`. In the eigenbasis of `H` this reduces to the scalar secular
//! equation `ψ(λ) = (M/2)‖s(λ)‖ − λ = 0`, solved here by safeguarded Newton.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, input, Error, Result};
use crate::linalg::{sym_eig, EigenDecomposition, Point, SymMatrix};
use crate::Scalar;

/// Gradient components in the minimal eigenspace below this fraction of
/// `‖g‖` are treated as zero when testing for the hard case.
pub const HARD_CASE_GRAD_TOL: f64 = 1e-12;

const MAX_SECULAR_ITERS: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicModel<T> {
    pub g: Point<T>,
    pub h: SymMatrix<T>,
    pub m: T,
}

impl<T: Scalar> CubicModel<T> {
    pub fn new(g: Point<T>, h: SymMatrix<T>, m: T) -> Result<Self> {
        let model = Self { g, h, m };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.h.dim(), self.g.dim())?;
        if self.g.dim() == 0 {
            return input("cubic model needs dimension >= 1");
        }
        if !(self.m > T::zero()) || !self.m.is_finite() {
            return input("cubic parameter M must be positive and finite");
        }
        if !self.g.is_finite() || !self.h.is_finite() {
            return input("cubic model has non-finite entries");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicSolution<T> {
    pub step: Point<T>,
    /// Multiplier `λ = (M/2)‖s‖`.
    pub lam: T,
    /// `m(s)`; nonpositive since `s = 0` is admissible.
    pub model_decrease: T,
    pub hard_case: bool,
    /// `‖(H + λI)s + g‖`
    pub stationarity_residual: T,
    /// `|λ − (M/2)‖s‖|`
    pub secular_residual: T,
    /// `λ_min(H)`, a by-product of the eigendecomposition.
    pub hessian_min_eig: T,
    pub iterations: usize,
}

/// Literal evaluation of `⟨g,s⟩ + ½sᵀHs + (M/6)‖s‖³`.
pub fn model_value<T: Scalar>(model: &CubicModel<T>, s: &Point<T>) -> T {
    let n = s.norm();
    model.g.dot(s) + model.h.quad_form(s) / T::lit(2.0) + model.m / T::lit(6.0) * n * n * n
}

/// Secular function in the shifted variable `δ = λ + λ₁`, where the
/// eigencoordinates read `s_i = −c_i/(d_i + δ)` with gaps `d_i = λ_i − λ₁`.
/// Working in `δ` keeps full relative precision when the optimal multiplier
/// sits just above `−λ₁`.
struct Secular<'a, T> {
    c: &'a [T],
    gaps: &'a [T],
    lambda1: T,
    half_m: T,
}

impl<T: Scalar> Secular<'_, T> {
    fn step_norm(&self, delta: T) -> T {
        Point::from_fn(self.c.len(), |i| self.c[i] / (self.gaps[i] + delta)).norm()
    }

    /// `(ψ, ψ')` at `δ`.
    fn eval(&self, delta: T) -> (T, T) {
        let n = self.step_norm(delta);
        let psi = self.half_m * n - (delta - self.lambda1);
        if n == T::zero() {
            return (psi, -T::one());
        }
        // d‖s‖/dδ = −Σ c_i²/(d_i+δ)³ / ‖s‖
        let mut acc = T::zero();
        for (&ci, &di) in self.c.iter().zip(self.gaps) {
            let w = ci / (di + delta);
            acc += w * w / (di + delta);
        }
        (psi, -self.half_m * acc / n - T::one())
    }
}

/// Globally minimizes the cubic model.
///
/// `tol` (in `[1e-14, 1e-6]`) bounds both residuals relative to
/// `1 + ‖g‖` and `1 + λ`.
pub fn solve_cubic<T: Scalar>(model: &CubicModel<T>, tol: T) -> Result<CubicSolution<T>> {
    model.validate()?;
    if !(tol >= T::lit(1e-14) && tol <= T::lit(1e-6)) {
        return input("subsolver tolerance must lie in [1e-14, 1e-6]");
    }
    let eig = sym_eig(&model.h)?;
    solve_in_eigenbasis(model, &eig, tol)
}

/// As [`solve_cubic`] with a precomputed eigendecomposition of `model.h`.
pub fn solve_in_eigenbasis<T: Scalar>(
    model: &CubicModel<T>,
    eig: &EigenDecomposition<T>,
    tol: T,
) -> Result<CubicSolution<T>> {
    let d = model.g.dim();
    let half_m = model.m / T::lit(2.0);
    let lambda1 = eig.min();
    let c = eig.to_eigen(&model.g);
    let gaps: Vec<T> = eig.eigenvalues.iter().map(|&l| l - lambda1).collect();
    let gnorm = model.g.norm();
    let cluster_tol = T::lit(1e-10) * T::one().max(model.h.max_abs());
    let in_cluster = |i: usize| gaps[i] <= cluster_tol;

    if gnorm == T::zero() && lambda1 >= T::zero() {
        return Ok(finish(model, eig, Point::zeros(d), T::zero(), false, 0));
    }

    // hard case: the minimal eigenspace sees (numerically) no gradient and
    // the step from the rest of the spectrum is too short at λ = −λ₁
    if lambda1 < T::zero() {
        let cluster_mass = (0..d).filter(|&i| in_cluster(i)).map(|i| c[i] * c[i]).sum::<T>().sqrt();
        if cluster_mass <= T::lit(HARD_CASE_GRAD_TOL) * gnorm {
            let lam = -lambda1;
            let mut y = Point::from_fn(d, |i| if in_cluster(i) { T::zero() } else { -c[i] / gaps[i] });
            let perp = y.norm();
            if half_m * perp < lam {
                let target = lam / half_m;
                let tau = (target * target - perp * perp).max(T::zero()).sqrt();
                // eigenvectors are sign-normalized (first nonzero coordinate
                // positive), so τ ≥ 0 along v₁ fixes the orientation
                y[0] = tau;
                return Ok(finish(model, eig, eig.from_eigen(&y), lam, true, 0));
            }
        }
    }

    let sec = Secular { c: c.as_slice(), gaps: &gaps, lambda1, half_m };
    let mut lo = lambda1.max(T::zero());
    // ψ is strictly decreasing in δ; grow the upper end until ψ ≤ 0
    let mut width = T::one().max(lo.abs()).max(half_m * gnorm);
    let mut hi = lo + width;
    let mut iters = 0;
    while sec.eval(hi).0 > T::zero() {
        lo = hi;
        width = width + width;
        hi = lo + width;
        iters += 1;
        if iters > 2000 || !hi.is_finite() {
            return Err(Error::Numerical("could not bracket the secular root".into()));
        }
    }
    if cfg!(debug_assertions) {
        check_monotone(&sec, lo, hi);
    }

    let stop = tol * T::lit(0.01);
    let mut delta = if lo > T::zero() { lo } else { (lo + hi) / T::lit(2.0) };
    let mut converged = false;
    for _ in 0..MAX_SECULAR_ITERS {
        iters += 1;
        let (psi, dpsi) = sec.eval(delta);
        let lam = delta - lambda1;
        if psi.abs() <= stop * (T::one() + lam.abs()) {
            converged = true;
            break;
        }
        if psi > T::zero() {
            lo = delta;
        } else {
            hi = delta;
        }
        if hi - lo <= T::epsilon() * T::lit(4.0) * hi.abs().max(T::min_positive_value()) {
            converged = true;
            break;
        }
        let newton = delta - psi / dpsi;
        if (newton - delta).abs() <= T::epsilon() * T::lit(4.0) * delta.abs() {
            converged = true;
            break;
        }
        delta = if newton > lo && newton < hi && dpsi < T::zero() { newton } else { (lo + hi) / T::lit(2.0) };
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "secular iteration did not converge in {MAX_SECULAR_ITERS} steps"
        )));
    }
    let y = Point::from_fn(d, |i| -c[i] / (gaps[i] + delta));
    Ok(finish(model, eig, eig.from_eigen(&y), delta - lambda1, false, iters))
}

fn finish<T: Scalar>(
    model: &CubicModel<T>,
    eig: &EigenDecomposition<T>,
    step: Point<T>,
    lam: T,
    hard_case: bool,
    iterations: usize,
) -> CubicSolution<T> {
    let stationarity_residual = stationarity(model, &step, lam);
    let secular_residual = (lam - model.m / T::lit(2.0) * step.norm()).abs();
    CubicSolution {
        model_decrease: model_value(model, &step),
        step,
        lam,
        hard_case,
        stationarity_residual,
        secular_residual,
        hessian_min_eig: eig.min(),
        iterations,
    }
}

fn stationarity<T: Scalar>(model: &CubicModel<T>, s: &Point<T>, lam: T) -> T {
    let mut r = model.h.matvec(s);
    r.axpy(lam, s);
    r.axpy(T::one(), &model.g);
    r.norm()
}

fn check_monotone<T: Scalar>(sec: &Secular<'_, T>, lo: T, hi: T) {
    let n = 20;
    let mut prev = T::infinity();
    for k in 1..=n {
        let delta = lo + (hi - lo) * T::from_usize_lossy(k) / T::from_usize_lossy(n);
        let cur = sec.step_norm(delta);
        debug_assert!(
            cur <= prev * (T::one() + T::epsilon() * T::lit(8.0)),
            "secular step norm increased on the bracket"
        );
        prev = cur;
    }
}

/// Independent check of the global optimality conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalityCertificate<T> {
    pub stationarity_residual: T,
    pub secular_residual: T,
    /// `λ_min(H + λI)`
    pub psd_margin: T,
    pub passed: bool,
}

/// Recomputes the residuals of `sol` and the spectrum of `H + λI`.
/// Passes when both residuals are within `tol` (relative to `1 + ‖g‖` and
/// `1 + λ`) and `λ_min(H + λI) ≥ −tol`.
pub fn verify_global_optimality<T: Scalar>(
    model: &CubicModel<T>,
    sol: &CubicSolution<T>,
    tol: T,
) -> OptimalityCertificate<T> {
    let stationarity_residual = stationarity(model, &sol.step, sol.lam);
    let secular_residual = (sol.lam - model.m / T::lit(2.0) * sol.step.norm()).abs();
    let psd_margin = sym_eig(&model.h.shifted(sol.lam)).map(|e| e.min()).unwrap_or(T::nan());
    let one = T::one();
    let passed = stationarity_residual <= tol * (one + model.g.norm())
        && secular_residual <= tol * (one + sol.lam.abs())
        && psd_margin >= -tol
        && sol.lam >= -tol;
    OptimalityCertificate { stationarity_residual, secular_residual, psd_margin, passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(g: &[f64], h: SymMatrix<f64>, m: f64) -> CubicModel<f64> {
        CubicModel::new(Point::from(g.to_vec()), h, m).unwrap()
    }

    #[test]
    fn zero_gradient_convex() {
        let md = model(&[0.0, 0.0], SymMatrix::<f64>::from_diag(&[1.0, 0.0]), 3.0);
        let sol = solve_cubic(&md, 1e-12).unwrap();
        assert_eq!(sol.step.norm(), 0.0);
        assert_eq!(sol.lam, 0.0);
        assert_eq!(sol.model_decrease, 0.0);
        let cert = verify_global_optimality(&md, &sol, 1e-10);
        assert!(cert.passed);
        assert_eq!(cert.stationarity_residual, 0.0);
        assert_eq!(cert.secular_residual, 0.0);
    }

    #[test]
    fn one_dimensional_linear_model() {
        // minimize s + |s|³: 1 + 3s|s| = 0
        let md = model(&[1.0], SymMatrix::zeros(1), 6.0);
        let sol = solve_cubic(&md, 1e-14).unwrap();
        let expect = -1.0 / 3f64.sqrt();
        assert!((sol.step[0] - expect).abs() < 1e-14);
        assert!((sol.lam - 3f64.sqrt()).abs() < 1e-14);
        let cert = verify_global_optimality(&md, &sol, 1e-10);
        assert!(cert.passed && cert.stationarity_residual <= 1e-10 && cert.secular_residual <= 1e-10);
    }

    #[test]
    fn hard_case_planar() {
        let md = model(&[0.0, 1.0], SymMatrix::<f64>::from_diag(&[-1.0, 1.0]), 2.0);
        let sol = solve_cubic(&md, 1e-12).unwrap();
        assert!(sol.hard_case);
        assert!((sol.lam - 1.0).abs() < 1e-15);
        assert!((sol.step[0] - 0.75f64.sqrt()).abs() < 1e-14);
        assert!((sol.step[1] + 0.5).abs() < 1e-15);
        assert!((sol.step.norm() - 1.0).abs() < 1e-14);
        assert!(sol.model_decrease < 0.0);
        assert!(verify_global_optimality(&md, &sol, 1e-10).passed);
    }

    #[test]
    fn pure_hard_case_zero_gradient() {
        let md = model(&[0.0, 0.0], SymMatrix::<f64>::from_diag(&[2.0, -3.0]), 1.5);
        let sol = solve_cubic(&md, 1e-12).unwrap();
        assert!(sol.hard_case);
        assert!((sol.lam - 3.0).abs() < 1e-15);
        assert!((sol.step.norm() - 4.0).abs() < 1e-14);
        assert!(sol.step[1] > 0.0);
    }

    #[test]
    fn model_value_terms() {
        let md = model(&[1.0, 0.0], SymMatrix::<f64>::identity(2), 6.0);
        assert_eq!(model_value(&md, &Point::zeros(2)), 0.0);
        assert_eq!(model_value(&md, &Point::from(vec![-1.0, 0.0])), 0.5);
        let doubled = model(&[2.0, 0.0], SymMatrix::<f64>::identity(2).scaled(2.0), 12.0);
        let s = Point::from(vec![0.3, -0.8]);
        assert!((model_value(&doubled, &s) - 2.0 * model_value(&md, &s)).abs() < 1e-15);
    }

    #[test]
    fn corrupted_step_fails_certificate() {
        let md = model(&[1.0, -2.0], SymMatrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, -1.0]]).unwrap(), 1.0);
        let mut sol = solve_cubic(&md, 1e-12).unwrap();
        assert!(verify_global_optimality(&md, &sol, 1e-8).passed);
        sol.step[0] += 0.1;
        assert!(!verify_global_optimality(&md, &sol, 1e-8).passed);
    }

    #[test]
    fn rejects_bad_input() {
        let bad_m = CubicModel { g: Point::from(vec![1.0]), h: SymMatrix::zeros(1), m: 0.0 };
        assert!(solve_cubic(&bad_m, 1e-10).is_err());
        let nan = CubicModel { g: Point::from(vec![f64::NAN]), h: SymMatrix::zeros(1), m: 1.0 };
        assert!(matches!(solve_cubic(&nan, 1e-10), Err(Error::Input(_))));
        let ok = model(&[1.0], SymMatrix::zeros(1), 1.0);
        assert!(solve_cubic(&ok, 1e-3).is_err());
    }

    #[test]
    fn near_hard_case_keeps_precision() {
        // gradient barely touches the negative eigendirection
        let md = model(&[1e-9, 0.1], SymMatrix::<f64>::from_diag(&[-1.0, 1.0]), 2.0);
        let sol = solve_cubic(&md, 1e-12).unwrap();
        assert!(!sol.hard_case);
        assert!(verify_global_optimality(&md, &sol, 1e-10).passed);
    }
}
