//! Objective and minimax oracles with analytically known constants.

mod bilinear;
mod power;
mod quadratic;
mod saddle;

pub use bilinear::Bilinear;
pub use power::PowerNorm;
pub use quadratic::Quadratic;
pub use saddle::SaddleConfined;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::kl::fit_line;
use crate::linalg::{Point, SymMatrix};
use crate::prox::ProxOperator;
use crate::Scalar;

/// Constants certified on the ball `‖x‖ ≤ valid_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConstants<T> {
    /// Gradient Lipschitz constant `L`.
    pub lipschitz_grad: T,
    /// Hessian Lipschitz constant `L₂`.
    pub lipschitz_hess: T,
    pub valid_radius: T,
    pub f_star: T,
    pub kl_theta: Option<T>,
}

/// Twice-differentiable objective with its certified constants.
pub trait SmoothOracle<T: Scalar>: Send + Sync {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn value(&self, x: &Point<T>) -> T;
    fn gradient(&self, x: &Point<T>) -> Point<T>;
    fn hessian(&self, x: &Point<T>) -> SymMatrix<T>;
    fn constants(&self) -> OracleConstants<T>;

    /// `f(x) − f*`. Implementations avoid the cancellation of the naive
    /// difference where they can.
    fn residual(&self, x: &Point<T>) -> T {
        self.value(x) - self.constants().f_star
    }

    /// Distance to the solution set.
    fn solution_distance(&self, x: &Point<T>) -> T;

    /// Closest point of the solution set, when it is known in closed form.
    fn nearest_solution(&self, _x: &Point<T>) -> Option<Point<T>> {
        None
    }
}

/// KŁ parameters: `φ(t) = (c/θ)·t^θ` on the `eps`-ball and value window `lam`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KLSpec<T> {
    pub theta: T,
    pub c: T,
    pub eps: T,
    pub lam: T,
}

impl<T: Scalar> KLSpec<T> {
    pub fn new(theta: T, c: T, eps: T, lam: T) -> Result<Self> {
        if !(theta > T::zero() && theta <= T::one()) {
            return input("KL exponent must lie in (0, 1]");
        }
        if !(c > T::zero() && eps > T::zero() && lam > T::zero()) {
            return input("KL constants must be strictly positive");
        }
        Ok(Self { theta, c, eps, lam })
    }

    /// `φ(t)`
    pub fn desingularizer(&self, t: T) -> T {
        self.c / self.theta * t.powf(self.theta)
    }

    /// Exponent of the residual bound `f − f* ≤ C·‖∇f‖^{1/(1−θ)}`; infinite at `θ = 1`.
    pub fn residual_exponent(&self) -> T {
        T::one() / (T::one() - self.theta)
    }
}

/// Max relative error between analytic and central-difference derivatives:
/// the gradient against differences of `value`, the Hessian against
/// differences of `gradient`. Entries are compared as `|a − b| / max(1, |a|)`.
pub fn check_derivatives<T: Scalar, O: SmoothOracle<T> + ?Sized>(oracle: &O, x: &Point<T>, step: T) -> T {
    let d = oracle.dim();
    let g = oracle.gradient(x);
    let h = oracle.hessian(x);
    let two_h = step + step;
    let rel = |a: T, b: T| (a - b).abs() / T::one().max(a.abs());
    let mut worst = T::zero();
    for j in 0..d {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += step;
        xm[j] -= step;
        let fd = (oracle.value(&xp) - oracle.value(&xm)) / two_h;
        worst = worst.max(rel(g[j], fd));
        let gp = oracle.gradient(&xp);
        let gm = oracle.gradient(&xm);
        for i in 0..d {
            worst = worst.max(rel(h.get(i, j), (gp[i] - gm[i]) / two_h));
        }
    }
    worst
}

/// Empirical KŁ inequality `f − f* ≤ C·‖∇f‖^{1/(1−θ)}` over sample points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KLSample {
    /// Smallest `C` valid on every sample.
    pub constant: f64,
    /// Least-squares slope of `log(f − f*)` against `log ‖∇f‖`.
    pub slope: f64,
    pub n_points: usize,
}

/// Samples with a nonpositive residual or gradient are skipped.
pub fn kl_sample<T: Scalar, O: SmoothOracle<T> + ?Sized>(oracle: &O, points: &[Point<T>], theta: f64) -> Result<KLSample> {
    if !(theta > 0.0 && theta < 1.0) {
        return input("empirical KL constant needs theta in (0, 1)");
    }
    let expo = 1.0 / (1.0 - theta);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut constant: f64 = 0.0;
    for p in points {
        let r = oracle.residual(p).to_f64_lossy();
        let gn = oracle.gradient(p).norm().to_f64_lossy();
        if r > 0.0 && gn > 0.0 {
            constant = constant.max(r / gn.powf(expo));
            xs.push(gn.ln());
            ys.push(r.ln());
        }
    }
    let fit = fit_line(&xs, &ys)?;
    Ok(KLSample { constant, slope: fit.slope, n_points: xs.len() })
}

/// Constants of a minimax instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimaxConstants<T> {
    /// Strong-concavity modulus in `y`.
    pub mu: T,
    /// Joint smoothness `L`.
    pub lipschitz: T,
    /// `L/μ`
    pub kappa: T,
    pub y_radius: T,
}

/// `min_x max_{y∈Y} f(x, y) + g(x) − h(y)` with `f` strongly concave in `y`.
pub trait MinimaxOracle<T: Scalar>: Send + Sync {
    fn name(&self) -> String;
    fn dim_x(&self) -> usize;
    fn dim_y(&self) -> usize;
    fn value(&self, x: &Point<T>, y: &Point<T>) -> T;
    fn grad_x(&self, x: &Point<T>, y: &Point<T>) -> Point<T>;
    fn grad_y(&self, x: &Point<T>, y: &Point<T>) -> Point<T>;
    fn constants(&self) -> MinimaxConstants<T>;
    fn prox_g(&self) -> &ProxOperator<T>;
    /// Includes the projection onto `Y`.
    fn prox_h(&self) -> &ProxOperator<T>;
    /// Exact maximizer `y*(x)` over `Y`.
    fn y_star(&self, x: &Point<T>) -> Point<T>;
    /// Whether `y*(x)` lies strictly inside `Y`, where the closed forms hold.
    fn y_star_interior(&self, x: &Point<T>) -> bool;
    /// `Φ(x) + g(x)` with `Φ(x) = max_y f(x, y)`.
    fn phi_plus_g(&self, x: &Point<T>) -> T;

    /// `∇Φ(x) = ∇₁f(x, y*(x))`
    fn phi_grad(&self, x: &Point<T>) -> Point<T> {
        self.grad_x(x, &self.y_star(x))
    }

    /// A known global minimizer of `Φ + g`.
    fn minimizer(&self) -> Option<Point<T>>;

    /// KŁ exponent of the Lyapunov function, when known.
    fn kl_theta(&self) -> Option<T> {
        None
    }
}
