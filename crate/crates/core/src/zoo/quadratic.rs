use crate::error::{check_dim, input, Result};
use crate::linalg::{solve_shifted, sym_eig, Point, SymMatrix};
use crate::zoo::{OracleConstants, SmoothOracle};
use crate::Scalar;

/// `f(x) = ½xᵀQx − bᵀx` with `Q ≻ 0`; `θ = 1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic<T> {
    q: SymMatrix<T>,
    b: Point<T>,
    minimizer: Point<T>,
    f_star: T,
    lipschitz: T,
}

impl<T: Scalar> Quadratic<T> {
    pub fn new(q: SymMatrix<T>, b: Point<T>) -> Result<Self> {
        check_dim(q.dim(), b.dim())?;
        if !q.is_finite() || !b.is_finite() {
            return input("quadratic data must be finite");
        }
        let eig = sym_eig(&q)?;
        if !(eig.min() > T::zero()) {
            return input(format!("Q is not positive definite (min eigenvalue {})", eig.min()));
        }
        let minimizer = solve_shifted(&q, T::zero(), &-&b)?;
        let f_star = -b.dot(&minimizer) / T::lit(2.0);
        Ok(Self { q, b, minimizer, f_star, lipschitz: eig.max() })
    }

    pub fn minimizer(&self) -> &Point<T> {
        &self.minimizer
    }

    pub fn matrix(&self) -> &SymMatrix<T> {
        &self.q
    }
}

impl<T: Scalar> SmoothOracle<T> for Quadratic<T> {
    fn name(&self) -> String {
        format!("quad:d={}", self.q.dim())
    }

    fn dim(&self) -> usize {
        self.q.dim()
    }

    fn value(&self, x: &Point<T>) -> T {
        self.q.quad_form(x) / T::lit(2.0) - self.b.dot(x)
    }

    fn gradient(&self, x: &Point<T>) -> Point<T> {
        &self.q.matvec(x) - &self.b
    }

    fn hessian(&self, _x: &Point<T>) -> SymMatrix<T> {
        self.q.clone()
    }

    fn constants(&self) -> OracleConstants<T> {
        OracleConstants {
            lipschitz_grad: self.lipschitz,
            lipschitz_hess: T::zero(),
            valid_radius: T::infinity(),
            f_star: self.f_star,
            kl_theta: Some(T::lit(0.5)),
        }
    }

    /// `½(x − x*)ᵀQ(x − x*)`, free of cancellation near `x*`.
    fn residual(&self, x: &Point<T>) -> T {
        self.q.quad_form(&(x - &self.minimizer)) / T::lit(2.0)
    }

    fn solution_distance(&self, x: &Point<T>) -> T {
        x.dist(&self.minimizer)
    }

    fn nearest_solution(&self, _x: &Point<T>) -> Option<Point<T>> {
        Some(self.minimizer.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::check_derivatives;

    #[test]
    fn identity_zero_rhs() {
        let f = Quadratic::new(SymMatrix::<f64>::identity(3), Point::zeros(3)).unwrap();
        assert_eq!(f.minimizer().norm(), 0.0);
        assert_eq!(f.constants().f_star, 0.0);
    }

    #[test]
    fn diagonal_instance() {
        let f = Quadratic::new(SymMatrix::<f64>::from_diag(&[1.0, 4.0]), Point::from(vec![1.0, 4.0])).unwrap();
        let x = f.minimizer();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        assert!((f.constants().f_star + 2.5).abs() < 1e-14);
        assert!(f.gradient(x).norm() <= 1e-12);
        assert_eq!(f.constants().lipschitz_grad, 4.0);
    }

    #[test]
    fn rejects_indefinite() {
        assert!(Quadratic::new(SymMatrix::<f64>::from_diag(&[1.0, 0.0]), Point::zeros(2)).is_err());
        assert!(Quadratic::new(SymMatrix::<f64>::from_diag(&[1.0, -1.0]), Point::zeros(2)).is_err());
    }

    #[test]
    fn residual_matches_value_gap() {
        let q = SymMatrix::<f64>::from_rows(vec![vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let f = Quadratic::new(q, Point::from(vec![0.3, -0.7])).unwrap();
        let x = Point::from(vec![1.2, 0.4]);
        assert!((f.residual(&x) - (f.value(&x) - f.constants().f_star)).abs() < 1e-14);
        assert!(check_derivatives(&f, &x, 1e-5) <= 1e-9);
    }
}
