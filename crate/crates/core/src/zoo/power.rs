use crate::error::{input, Result};
use crate::linalg::{Point, SymMatrix};
use crate::zoo::{OracleConstants, SmoothOracle};
use crate::Scalar;

/// `f(x) = scale·‖x‖ᵖ` for `p ∈ {2, 3, 4, 6}`, with `Ω = {0}` and `θ = 1/p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerNorm<T> {
    dim: usize,
    p: i32,
    scale: T,
    radius: T,
}

impl<T: Scalar> PowerNorm<T> {
    pub const SUPPORTED: [i32; 4] = [2, 3, 4, 6];

    /// Constants are certified on the unit-start default ball of radius 3.
    pub fn new(dim: usize, p: T, scale: T) -> Result<Self> {
        if dim == 0 {
            return input("dimension must be positive");
        }
        let p_int = p.round().to_i32().unwrap_or(0);
        if T::from_i32(p_int) != Some(p) || !Self::SUPPORTED.contains(&p_int) {
            return input(format!("power norm exponent must be one of 2, 3, 4, 6 (got {p})"));
        }
        if !(scale > T::zero() && scale.is_finite()) {
            return input("power norm scale must be positive");
        }
        Ok(Self { dim, p: p_int, scale, radius: T::lit(3.0) })
    }

    pub fn with_radius(mut self, radius: T) -> Result<Self> {
        if !(radius > T::zero() && radius.is_finite()) {
            return input("valid radius must be positive and finite");
        }
        self.radius = radius;
        Ok(self)
    }

    pub fn exponent(&self) -> i32 {
        self.p
    }

    pub fn scale(&self) -> T {
        self.scale
    }
}

impl<T: Scalar> SmoothOracle<T> for PowerNorm<T> {
    fn name(&self) -> String {
        format!("power{}:d={},scale={}", self.p, self.dim, self.scale)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Point<T>) -> T {
        if self.p % 2 == 0 {
            self.scale * x.norm_sq().powi(self.p / 2)
        } else {
            self.scale * x.norm().powi(self.p)
        }
    }

    fn gradient(&self, x: &Point<T>) -> Point<T> {
        let p = T::from_i32(self.p).unwrap();
        let radial = if self.p % 2 == 0 { x.norm_sq().powi((self.p - 2) / 2) } else { x.norm().powi(self.p - 2) };
        x.scaled(self.scale * p * radial)
    }

    fn hessian(&self, x: &Point<T>) -> SymMatrix<T> {
        // ∇²f = c·p·r^{p−2}·(I + (p−2)·uuᵀ), u = x/r
        let p = T::from_i32(self.p).unwrap();
        let r = x.norm();
        if r == T::zero() {
            let d = if self.p == 2 { self.scale * p } else { T::zero() };
            return SymMatrix::from_diag(&vec![d; self.dim]);
        }
        let a = self.scale * p * r.powi(self.p - 2);
        let mut h = SymMatrix::from_diag(&vec![a; self.dim]);
        h.rank_one_update(a * (p - T::lit(2.0)), &x.scaled(T::one() / r));
        h
    }

    fn constants(&self) -> OracleConstants<T> {
        // On ‖x‖ ≤ R: the largest Hessian eigenvalue is c·p(p−1)·R^{p−2},
        // and the third directional derivative peaks along x at
        // c·p(p−1)(p−2)·R^{p−3}.
        let p = T::from_i32(self.p).unwrap();
        let one = T::one();
        let two = T::lit(2.0);
        let r = self.radius;
        let lipschitz_grad = self.scale * p * (p - one) * r.powi(self.p - 2);
        let lipschitz_hess = if self.p == 2 {
            T::zero()
        } else {
            self.scale * p * (p - one) * (p - two) * r.powi(self.p - 3)
        };
        OracleConstants {
            lipschitz_grad,
            lipschitz_hess,
            valid_radius: r,
            f_star: T::zero(),
            kl_theta: Some(one / p),
        }
    }

    fn residual(&self, x: &Point<T>) -> T {
        self.value(x)
    }

    fn solution_distance(&self, x: &Point<T>) -> T {
        x.norm()
    }

    fn nearest_solution(&self, x: &Point<T>) -> Option<Point<T>> {
        Some(Point::zeros(x.dim()))
    }
}
