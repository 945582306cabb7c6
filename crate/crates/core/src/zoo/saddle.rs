use crate::error::{input, Result};
use crate::linalg::{sym_eig, Point, SymMatrix};
use crate::zoo::{OracleConstants, SmoothOracle};
use crate::Scalar;

/// `f(x) = ½xᵀDx + (γ/4)‖x‖⁴` with `D` indefinite.
///
/// The origin is a strict saddle. Since `xᵀDx ≥ λ₁‖x‖²` with equality
/// exactly on the `λ₁`-eigenspace, the global minimizers are that
/// eigenspace intersected with the sphere of radius `√(−λ₁/γ)`, and
/// `f* = −λ₁²/(4γ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleConfined<T> {
    d: SymMatrix<T>,
    gamma: T,
    lambda_min: T,
    lambda_max: T,
    /// Orthonormal basis of the `λ₁`-eigenspace.
    min_space: Vec<Point<T>>,
    radius: T,
}

impl<T: Scalar> SaddleConfined<T> {
    /// Constants are certified for starts at the origin; use
    /// [`Self::for_start`] or [`Self::with_radius`] otherwise.
    pub fn new(d: SymMatrix<T>, gamma: T) -> Result<Self> {
        if !(gamma > T::zero() && gamma.is_finite()) {
            return input("gamma must be positive");
        }
        if d.dim() == 0 || !d.is_finite() {
            return input("D must be a finite nonempty matrix");
        }
        let eig = sym_eig(&d)?;
        let (lo, hi) = (eig.min(), eig.max());
        if !(lo < T::zero()) {
            return input("D is positive semidefinite: no strict saddle at the origin");
        }
        if !(hi > T::zero()) {
            return input("D needs a positive eigenvalue for the origin to be a saddle");
        }
        let tol = T::lit(1e-10) * T::one().max(d.max_abs());
        let min_space = (0..eig.dim())
            .filter(|&k| eig.eigenvalues[k] <= lo + tol)
            .map(|k| eig.vector(k))
            .collect();
        let mut out = Self { d, gamma, lambda_min: lo, lambda_max: hi, min_space, radius: T::one() };
        out.radius = out.default_radius(&Point::zeros(out.d.dim()));
        Ok(out)
    }

    /// `R = max(2‖x₀‖ + 1, ρ₀)` where `ρ₀` bounds the sublevel set
    /// `{f ≤ f(x₀)}` via `½λ₁ρ² + (γ/4)ρ⁴ ≤ f(x₀)`.
    pub fn for_start(mut self, x0: &Point<T>) -> Self {
        self.radius = self.default_radius(x0);
        self
    }

    pub fn with_radius(mut self, radius: T) -> Result<Self> {
        if !(radius > T::zero() && radius.is_finite()) {
            return input("valid radius must be positive and finite");
        }
        self.radius = radius;
        Ok(self)
    }

    fn default_radius(&self, x0: &Point<T>) -> T {
        let two = T::lit(2.0);
        let f0 = self.value(x0);
        let l = self.lambda_min;
        let disc = (l * l + T::lit(4.0) * self.gamma * f0).max(T::zero());
        let sub = ((-l + disc.sqrt()) / self.gamma).max(T::zero()).sqrt();
        (two * x0.norm() + T::one()).max(sub)
    }

    /// Radius of the minimizer sphere, `√(−λ₁/γ)`.
    pub fn minimizer_radius(&self) -> T {
        (-self.lambda_min / self.gamma).sqrt()
    }

    pub fn min_eigenspace(&self) -> &[Point<T>] {
        &self.min_space
    }

    fn project_min_space(&self, x: &Point<T>) -> Point<T> {
        let mut p = Point::zeros(x.dim());
        for v in &self.min_space {
            p.axpy(v.dot(x), v);
        }
        p
    }
}

impl<T: Scalar> SmoothOracle<T> for SaddleConfined<T> {
    fn name(&self) -> String {
        format!("saddle:d={},gamma={}", self.d.dim(), self.gamma)
    }

    fn dim(&self) -> usize {
        self.d.dim()
    }

    fn value(&self, x: &Point<T>) -> T {
        let r2 = x.norm_sq();
        self.d.quad_form(x) / T::lit(2.0) + self.gamma * r2 * r2 / T::lit(4.0)
    }

    fn gradient(&self, x: &Point<T>) -> Point<T> {
        let mut g = self.d.matvec(x);
        g.axpy(self.gamma * x.norm_sq(), x);
        g
    }

    fn hessian(&self, x: &Point<T>) -> SymMatrix<T> {
        let mut h = self.d.shifted(self.gamma * x.norm_sq());
        h.rank_one_update(T::lit(2.0) * self.gamma, x);
        h
    }

    fn constants(&self) -> OracleConstants<T> {
        let r = self.radius;
        let three = T::lit(3.0);
        OracleConstants {
            lipschitz_grad: (-self.lambda_min).max(self.lambda_max + three * self.gamma * r * r),
            lipschitz_hess: T::lit(6.0) * self.gamma * r,
            valid_radius: r,
            f_star: -self.lambda_min * self.lambda_min / (T::lit(4.0) * self.gamma),
            kl_theta: None,
        }
    }

    fn solution_distance(&self, x: &Point<T>) -> T {
        let rho = self.minimizer_radius();
        let p = self.project_min_space(x);
        let pn = p.norm();
        if pn == T::zero() {
            return (x.norm_sq() + rho * rho).sqrt();
        }
        let perp = (x - &p).norm_sq();
        (perp + (pn - rho) * (pn - rho)).sqrt()
    }

    fn nearest_solution(&self, x: &Point<T>) -> Option<Point<T>> {
        let rho = self.minimizer_radius();
        let p = self.project_min_space(x);
        let pn = p.norm();
        Some(if pn == T::zero() { self.min_space[0].scaled(rho) } else { p.scaled(rho / pn) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::min_eigenvalue;
    use crate::zoo::check_derivatives;

    fn two_d() -> SaddleConfined<f64> {
        SaddleConfined::<f64>::new(SymMatrix::<f64>::from_diag(&[-1.0, 1.0]), 1.0).unwrap()
    }

    #[test]
    fn minimizers_of_planar_instance() {
        let f = two_d();
        for s in [1.0, -1.0] {
            let x = Point::from(vec![s, 0.0]);
            assert!(f.gradient(&x).norm() <= 1e-12);
            assert!((f.value(&x) + 0.25).abs() < 1e-15);
            assert!(f.solution_distance(&x) < 1e-15);
        }
        assert_eq!(f.constants().f_star, -0.25);
    }

    #[test]
    fn saddle_certificate() {
        let f = two_d();
        let z = Point::zeros(2);
        assert_eq!(f.gradient(&z).norm(), 0.0);
        assert!((min_eigenvalue(&f.hessian(&z)).unwrap() + 1.0).abs() < 1e-14);
        assert!((f.solution_distance(&z) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn distance_matches_nearest_solution() {
        let d = SymMatrix::<f64>::from_diag(&[-2.0, -2.0, 0.5]);
        let f = SaddleConfined::<f64>::new(d, 0.5).unwrap();
        let x = Point::from(vec![0.3, -0.4, 0.7]);
        let near = f.nearest_solution(&x).unwrap();
        assert!((near.norm() - 2.0).abs() < 1e-14);
        assert!((f.solution_distance(&x) - x.dist(&near)).abs() < 1e-14);
        assert!(f.gradient(&near).norm() < 1e-12);
        assert!(check_derivatives(&f, &x, 1e-5) <= 1e-5);
    }

    #[test]
    fn rejects_semidefinite() {
        assert!(SaddleConfined::<f64>::new(SymMatrix::<f64>::from_diag(&[0.0, 1.0]), 1.0).is_err());
        assert!(SaddleConfined::<f64>::new(SymMatrix::<f64>::from_diag(&[-1.0, -1.0]), 1.0).is_err());
        assert!(SaddleConfined::<f64>::new(SymMatrix::<f64>::from_diag(&[-1.0, 1.0]), 0.0).is_err());
    }

    #[test]
    fn start_radius_covers_sublevel_set() {
        let f = two_d().for_start(&Point::from(vec![0.1, 0.1]));
        // sublevel radius for f0 ≈ 0.0001 exceeds the minimizer radius 1
        assert!(f.constants().valid_radius >= 1.2);
        assert!((f.constants().lipschitz_hess - 6.0 * f.constants().valid_radius).abs() < 1e-14);
    }
}
