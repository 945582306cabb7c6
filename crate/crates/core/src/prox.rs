//! Closed-form proximal operators for the regularizers supported by
//! proximal GDA.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, input, Result};
use crate::linalg::Point;
use crate::Scalar;

/// Regularizer with a single-valued closed-form prox.
///
/// * `Zero`: `r(u) = 0`
/// * `L1`: `r(u) = weight·‖u‖₁`
/// * `SquaredL2`: `r(u) = (weight/2)·‖u‖²`
/// * `Ball`: indicator of `{‖u‖ ≤ radius}`
/// * `Box`: indicator of `{lo ≤ u ≤ hi}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProxOperator<T> {
    Zero,
    L1 { weight: T },
    SquaredL2 { weight: T },
    Ball { radius: T },
    Box { lo: Point<T>, hi: Point<T> },
}

impl<T: Scalar> ProxOperator<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProxOperator::Zero => Ok(()),
            ProxOperator::L1 { weight } | ProxOperator::SquaredL2 { weight } => {
                if *weight >= T::zero() && weight.is_finite() {
                    Ok(())
                } else {
                    input("regularizer weight must be finite and nonnegative")
                }
            }
            ProxOperator::Ball { radius } => {
                if *radius > T::zero() {
                    Ok(())
                } else {
                    input("ball radius must be positive")
                }
            }
            ProxOperator::Box { lo, hi } => {
                check_dim(lo.dim(), hi.dim())?;
                if lo.iter().zip(hi.iter()).all(|(l, h)| l <= h) {
                    Ok(())
                } else {
                    input("box bounds require lo <= hi componentwise")
                }
            }
        }
    }

    /// `argmin_u r(u) + ‖u − v‖²/(2η)`; Euclidean projection for the
    /// indicator kinds.
    pub fn apply(&self, v: &Point<T>, eta: T) -> Result<Point<T>> {
        if !(eta > T::zero()) {
            return input("prox step must be positive");
        }
        self.validate()?;
        Ok(match self {
            ProxOperator::Zero => v.clone(),
            ProxOperator::L1 { weight } => {
                let t = *weight * eta;
                v.map(|a| a.signum() * (a.abs() - t).max(T::zero()))
            }
            ProxOperator::SquaredL2 { weight } => v.scaled(T::one() / (T::one() + eta * *weight)),
            ProxOperator::Ball { radius } => {
                let n = v.norm();
                if n <= *radius {
                    v.clone()
                } else {
                    v.scaled(*radius / n)
                }
            }
            ProxOperator::Box { lo, hi } => {
                check_dim(lo.dim(), v.dim())?;
                Point::from_fn(v.dim(), |i| v[i].max(lo[i]).min(hi[i]))
            }
        })
    }

    /// Regularizer value (`+∞` outside an indicator's set).
    pub fn value(&self, u: &Point<T>) -> T {
        match self {
            ProxOperator::Zero => T::zero(),
            ProxOperator::L1 { weight } => *weight * u.iter().map(|a| a.abs()).sum::<T>(),
            ProxOperator::SquaredL2 { weight } => *weight * u.norm_sq() / T::lit(2.0),
            ProxOperator::Ball { radius } => {
                if u.norm() <= *radius * (T::one() + T::epsilon() * T::lit(16.0)) {
                    T::zero()
                } else {
                    T::infinity()
                }
            }
            ProxOperator::Box { lo, hi } => {
                if u.iter().zip(lo.iter().zip(hi.iter())).all(|(x, (l, h))| x >= l && x <= h) {
                    T::zero()
                } else {
                    T::infinity()
                }
            }
        }
    }

    /// Lower bound on the curvature the regularizer adds (its strong-convexity modulus).
    pub fn curvature(&self) -> T {
        match self {
            ProxOperator::SquaredL2 { weight } => *weight,
            _ => T::zero(),
        }
    }

    /// `dist(0, grad + ∂r(u))` for the convex subdifferential of `r` at `u`.
    pub fn stationarity_distance(&self, u: &Point<T>, grad: &Point<T>) -> T {
        match self {
            ProxOperator::Zero => grad.norm(),
            ProxOperator::L1 { weight } => Point::from_fn(u.dim(), |i| {
                if u[i] != T::zero() {
                    grad[i] + *weight * u[i].signum()
                } else {
                    (grad[i].abs() - *weight).max(T::zero())
                }
            })
            .norm(),
            ProxOperator::SquaredL2 { weight } => {
                let mut r = grad.clone();
                r.axpy(*weight, u);
                r.norm()
            }
            ProxOperator::Ball { radius } => {
                let n = u.norm();
                if n < *radius * (T::one() - T::lit(1e-12)) || n == T::zero() {
                    return grad.norm();
                }
                let unit = u.scaled(T::one() / n);
                let a = grad.dot(&unit);
                if a >= T::zero() {
                    grad.norm()
                } else {
                    let mut perp = grad.clone();
                    perp.axpy(-a, &unit);
                    perp.norm()
                }
            }
            ProxOperator::Box { lo, hi } => Point::from_fn(u.dim(), |i| {
                let gi = grad[i];
                let at_lo = u[i] <= lo[i];
                let at_hi = u[i] >= hi[i];
                match (at_lo, at_hi) {
                    (true, true) => T::zero(),
                    // normal cone at lo is (-inf, 0]
                    (true, false) => gi.max(T::zero()),
                    (false, true) => gi.min(T::zero()),
                    (false, false) => gi,
                }
            })
            .norm(),
        }
    }
}

/// Free-function form of [`ProxOperator::apply`].
pub fn apply_prox<T: Scalar>(op: &ProxOperator<T>, v: &Point<T>, eta: T) -> Result<Point<T>> {
    op.apply(v, eta)
}
