use crate::error::{check_dim, input, Error, Result};
use crate::linalg::{spectral_norm, sym_eig, Matrix, Point, SymMatrix};
use crate::prox::ProxOperator;
use crate::zoo::{MinimaxConstants, MinimaxOracle};
use crate::Scalar;

/// `f(x, y) = ½xᵀD_x x + xᵀAy − (μ/2)‖y‖²` over `Y = {‖y‖ ≤ y_radius}`,
/// regularized by `g` in `x`.
///
/// While `Aᵀx/μ` is inside `Y`: `y*(x) = Aᵀx/μ` and
/// `Φ(x) = ½xᵀ(D_x + AAᵀ/μ)x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bilinear<T> {
    a: Matrix<T>,
    mu: T,
    d_x: SymMatrix<T>,
    /// `D_x + AAᵀ/μ`
    phi_hessian: SymMatrix<T>,
    g: ProxOperator<T>,
    h: ProxOperator<T>,
    lipschitz: T,
    y_radius: T,
    minimizer: Option<Point<T>>,
    strongly_convex: bool,
}

impl<T: Scalar> Bilinear<T> {
    /// `d_x = None` means `D_x = 0`.
    pub fn new(a: Matrix<T>, mu: T, d_x: Option<SymMatrix<T>>, g: ProxOperator<T>, y_radius: T) -> Result<Self> {
        if !(mu > T::zero() && mu.is_finite()) {
            return input("mu must be positive");
        }
        if !(y_radius > T::zero()) {
            return input("y_radius must be positive");
        }
        if a.rows() == 0 || a.cols() == 0 || !a.is_finite() {
            return input("coupling matrix must be finite and nonempty");
        }
        g.validate()?;
        let (m, n) = (a.rows(), a.cols());
        let d_x = d_x.unwrap_or_else(|| SymMatrix::zeros(m));
        check_dim(m, d_x.dim())?;
        if let ProxOperator::Box { lo, .. } = &g {
            check_dim(m, lo.dim())?;
        }
        let full = SymMatrix::from_upper(m + n, |i, j| match (i < m, j < m) {
            (true, true) => d_x.get(i, j),
            (true, false) => a.get(i, j - m),
            (false, false) if i == j => -mu,
            _ => T::zero(),
        });
        let lipschitz = spectral_norm(&full)?;
        let aat = a.matmul(&a.transpose());
        let phi_hessian = d_x.add(&SymMatrix::symmetrize(&aat).scaled(T::one() / mu));
        let curvature = sym_eig(&phi_hessian)?.min() + g.curvature();
        let zero = Point::zeros(m);
        let zero_feasible = g.value(&zero) == T::zero();
        let bounded_domain = matches!(g, ProxOperator::Ball { .. } | ProxOperator::Box { .. });
        let minimizer = if curvature >= T::zero() && zero_feasible {
            Some(zero)
        } else if bounded_domain {
            None
        } else {
            return Err(Error::Config("Phi + g is unbounded below for this instance".into()));
        };
        Ok(Self {
            a,
            mu,
            d_x,
            phi_hessian,
            g,
            h: ProxOperator::Ball { radius: y_radius },
            lipschitz,
            y_radius,
            minimizer,
            strongly_convex: curvature > T::zero(),
        })
    }

    /// `D_x + AAᵀ/μ`
    pub fn phi_hessian(&self) -> &SymMatrix<T> {
        &self.phi_hessian
    }
}

impl<T: Scalar> MinimaxOracle<T> for Bilinear<T> {
    fn name(&self) -> String {
        format!("bilinear:dx={},dy={},mu={}", self.a.rows(), self.a.cols(), self.mu)
    }

    fn dim_x(&self) -> usize {
        self.a.rows()
    }

    fn dim_y(&self) -> usize {
        self.a.cols()
    }

    fn value(&self, x: &Point<T>, y: &Point<T>) -> T {
        let two = T::lit(2.0);
        self.d_x.quad_form(x) / two + x.dot(&self.a.matvec(y)) - self.mu * y.norm_sq() / two
    }

    fn grad_x(&self, x: &Point<T>, y: &Point<T>) -> Point<T> {
        &self.d_x.matvec(x) + &self.a.matvec(y)
    }

    fn grad_y(&self, x: &Point<T>, y: &Point<T>) -> Point<T> {
        let mut g = self.a.tmatvec(x);
        g.axpy(-self.mu, y);
        g
    }

    fn constants(&self) -> MinimaxConstants<T> {
        MinimaxConstants {
            mu: self.mu,
            lipschitz: self.lipschitz,
            kappa: self.lipschitz / self.mu,
            y_radius: self.y_radius,
        }
    }

    fn prox_g(&self) -> &ProxOperator<T> {
        &self.g
    }

    fn prox_h(&self) -> &ProxOperator<T> {
        &self.h
    }

    fn y_star(&self, x: &Point<T>) -> Point<T> {
        // the objective in y is isotropic, so the constrained maximizer is
        // the projection of the unconstrained one
        let y = self.a.tmatvec(x).scaled(T::one() / self.mu);
        let n = y.norm();
        if n <= self.y_radius {
            y
        } else {
            y.scaled(self.y_radius / n)
        }
    }

    fn y_star_interior(&self, x: &Point<T>) -> bool {
        self.a.tmatvec(x).norm() / self.mu < self.y_radius
    }

    fn phi_plus_g(&self, x: &Point<T>) -> T {
        self.phi_hessian.quad_form(x) / T::lit(2.0) + self.g.value(x)
    }

    fn minimizer(&self) -> Option<Point<T>> {
        self.minimizer.clone()
    }

    /// `1/2` when `Φ + g` is strongly convex (a PL function).
    fn kl_theta(&self) -> Option<T> {
        self.strongly_convex.then(|| T::lit(0.5))
    }
}
