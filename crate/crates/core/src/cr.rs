//! Cubic-regularized Newton: `x_{k+1} = x_k + argmin_s m_k(s)` with
//! per-iteration monitors for the descent dynamics.

use serde::{Deserialize, Serialize};

use crate::cubic::{solve_in_eigenbasis, CubicModel};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{sym_eig, Point};
use crate::zoo::SmoothOracle;
use crate::Scalar;

/// Cubic parameter used when the oracle's Hessian is constant (`L₂ = 0`),
/// where the usual `2·L₂` default degenerates.
pub const M_FOR_CONSTANT_HESSIAN: f64 = 10.0;
/// Steps at or below this norm count toward the stagnation guard.
pub const STAGNATION_STEP: f64 = 1e-15;
pub const MAX_ITERS_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CRConfig<T> {
    pub m: T,
    pub max_iters: usize,
    pub grad_tol: T,
    pub neg_eig_tol: T,
    pub subsolver_tol: T,
    /// Keep every iterate in the trace.
    pub store_points: bool,
}

impl<T: Scalar> CRConfig<T> {
    pub fn new(m: T) -> Self {
        Self {
            m,
            max_iters: 10_000,
            grad_tol: T::lit(1e-10),
            neg_eig_tol: T::lit(1e-8),
            subsolver_tol: T::lit(1e-12),
            store_points: false,
        }
    }

    /// `M = 2·L₂`, or [`M_FOR_CONSTANT_HESSIAN`] when `L₂ = 0`.
    pub fn for_oracle<O: SmoothOracle<T> + ?Sized>(oracle: &O) -> Self {
        Self::new(default_m(oracle.constants().lipschitz_hess))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.into()));
        if !(self.m > T::zero() && self.m.is_finite()) {
            return bad("M must be positive and finite");
        }
        if self.max_iters == 0 || self.max_iters > MAX_ITERS_LIMIT {
            return bad("max_iters must lie in 1..=1000000");
        }
        if !(self.grad_tol > T::zero() && self.neg_eig_tol > T::zero()) {
            return bad("stopping tolerances must be positive");
        }
        if !(self.subsolver_tol >= T::lit(1e-14) && self.subsolver_tol <= T::lit(1e-6)) {
            return bad("subsolver tolerance must lie in [1e-14, 1e-6]");
        }
        Ok(())
    }
}

pub fn default_m<T: Scalar>(lipschitz_hess: T) -> T {
    if lipschitz_hess > T::zero() {
        T::lit(2.0) * lipschitz_hess
    } else {
        T::lit(M_FOR_CONSTANT_HESSIAN)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CRTraceRecord<T> {
    pub k: usize,
    pub f: T,
    /// `f(x_k) − f*`
    pub r: T,
    pub grad_norm: T,
    /// `λ_min(∇²f(x_k))`
    pub min_eig: T,
    /// `‖x_{k+1} − x_k‖`; `None` on the last record.
    pub step_norm: Option<T>,
    pub mu_gap: T,
    /// Distance to the solution set.
    pub dist: T,
    /// `‖x_k − x_final‖`
    pub dist_to_final: T,
    /// `‖x_k − x̄‖` with `x̄` the solution nearest the final iterate (the
    /// final iterate itself when the solution set is not known).
    pub dist_to_limit: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GradAndEigTol,
    MaxIters,
    Stagnation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CRTrace<T> {
    pub records: Vec<CRTraceRecord<T>>,
    pub terminated_by: Termination,
    pub oracle_id: String,
    pub config: CRConfig<T>,
    /// The `L` used for `mu_gap`: the oracle's Hessian-Lipschitz constant.
    pub lipschitz_hess: T,
    pub final_point: Point<T>,
    /// Every iterate, when `config.store_points` is set.
    pub points: Option<Vec<Point<T>>>,
}

impl<T: Scalar> CRTrace<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> &CRTraceRecord<T> {
        self.records.last().expect("trace has at least one record")
    }

    /// Projection of a record column to `f64` for rate analysis.
    pub fn column(&self, pick: impl Fn(&CRTraceRecord<T>) -> T) -> Vec<f64> {
        self.records.iter().map(|r| pick(r).to_f64_lossy()).collect()
    }
}

/// `μ(x) = max(√(2‖∇f‖/(L+M)), (2/(2L+M))·max(0, −λ_min))`.
pub fn mu_from_parts<T: Scalar>(grad_norm: T, min_eig: T, l: T, m: T) -> T {
    let two = T::lit(2.0);
    let grad_part = (two * grad_norm / (l + m)).sqrt();
    let curv_part = two / (two * l + m) * (-min_eig).max(T::zero());
    grad_part.max(curv_part)
}

/// Second-order stationarity gap `μ(x)`; `NaN` if the Hessian spectrum
/// cannot be computed.
pub fn stationarity_gap<T: Scalar, O: SmoothOracle<T> + ?Sized>(oracle: &O, x: &Point<T>, l: T, m: T) -> T {
    let min_eig = sym_eig(&oracle.hessian(x)).map(|e| e.min()).unwrap_or(T::nan());
    mu_from_parts(oracle.gradient(x).norm(), min_eig, l, m)
}

pub fn run_cr<T: Scalar, O: SmoothOracle<T> + ?Sized>(oracle: &O, x0: &Point<T>, config: &CRConfig<T>) -> Result<CRTrace<T>> {
    config.validate()?;
    check_dim(oracle.dim(), x0.dim())?;
    if !x0.is_finite() {
        return Err(Error::Input("starting point is not finite".into()));
    }
    let constants = oracle.constants();
    let radius = constants.valid_radius;
    let l2 = constants.lipschitz_hess;
    let check_ball = |iter: usize, x: &Point<T>| {
        let n = x.norm();
        if n > radius * (T::one() + T::lit(1e-12)) {
            Err(Error::BallViolation { iter, norm: n.to_f64_lossy(), radius: radius.to_f64_lossy() })
        } else {
            Ok(())
        }
    };
    check_ball(0, x0)?;

    let mut x = x0.clone();
    let mut points = vec![x.clone()];
    let mut records = Vec::new();
    let mut tiny_steps = 0;
    let terminated_by;
    let mut k = 0;
    loop {
        let g = oracle.gradient(&x);
        let h = oracle.hessian(&x);
        let eig = sym_eig(&h)?;
        let grad_norm = g.norm();
        let min_eig = eig.min();
        let mut rec = CRTraceRecord {
            k,
            f: oracle.value(&x),
            r: oracle.residual(&x),
            grad_norm,
            min_eig,
            step_norm: None,
            mu_gap: mu_from_parts(grad_norm, min_eig, l2, config.m),
            dist: oracle.solution_distance(&x),
            dist_to_final: T::zero(),
            dist_to_limit: T::zero(),
        };
        if grad_norm <= config.grad_tol && min_eig >= -config.neg_eig_tol {
            records.push(rec);
            terminated_by = Termination::GradAndEigTol;
            break;
        }
        if tiny_steps >= 2 {
            records.push(rec);
            terminated_by = Termination::Stagnation;
            break;
        }
        if k == config.max_iters {
            records.push(rec);
            terminated_by = Termination::MaxIters;
            break;
        }
        let model = CubicModel { g, h, m: config.m };
        let sol = solve_in_eigenbasis(&model, &eig, config.subsolver_tol)?;
        let step_norm = sol.step.norm();
        rec.step_norm = Some(step_norm);
        records.push(rec);
        tiny_steps = if step_norm <= T::lit(STAGNATION_STEP) { tiny_steps + 1 } else { 0 };
        x.axpy(T::one(), &sol.step);
        if !x.is_finite() {
            return Err(Error::Numerical(format!("iterate became non-finite at iteration {}", k + 1)));
        }
        check_ball(k + 1, &x)?;
        points.push(x.clone());
        k += 1;
    }

    let limit = oracle.nearest_solution(&x).unwrap_or_else(|| x.clone());
    for (rec, p) in records.iter_mut().zip(&points) {
        rec.dist_to_final = p.dist(&x);
        rec.dist_to_limit = p.dist(&limit);
    }
    Ok(CRTrace {
        records,
        terminated_by,
        oracle_id: oracle.name(),
        config: config.clone(),
        lipschitz_hess: l2,
        final_point: x,
        points: config.store_points.then_some(points),
    })
}

/// Slacks (right-hand side minus left-hand side) of the three per-step
/// inequalities, indexed by the step `k → k+1`:
///
/// * `‖∇f(x_{k+1})‖ ≤ ((L+M)/2)·‖x_{k+1} − x_k‖²`
/// * `f(x_{k+1}) ≤ f(x_k) − (M/12)·‖x_{k+1} − x_k‖³`
/// * `−λ_min(∇²f(x_{k+1})) ≤ ((2L+M)/2)·‖x_{k+1} − x_k‖`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSlack<T> {
    pub k: usize,
    pub grad: T,
    pub decrease: T,
    pub eig: T,
    /// `1e-9·(1 + |f(x_k)|)`
    pub tolerance: T,
}

impl<T: Scalar> DynamicsSlack<T> {
    pub fn min(&self) -> T {
        self.grad.min(self.decrease).min(self.eig)
    }

    pub fn holds(&self) -> bool {
        self.min() >= -self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsReport<T> {
    pub steps: Vec<DynamicsSlack<T>>,
    pub min_grad: T,
    pub min_decrease: T,
    pub min_eig: T,
    pub violations: usize,
}

impl<T: Scalar> DynamicsReport<T> {
    pub fn all_hold(&self) -> bool {
        self.violations == 0
    }
}

/// `L` here is the Hessian-Lipschitz constant. Violations are counted,
/// never raised.
pub fn dynamics_check<T: Scalar>(trace: &CRTrace<T>, l: T, m: T) -> DynamicsReport<T> {
    let two = T::lit(2.0);
    let mut steps = Vec::new();
    for pair in trace.records.windows(2) {
        let (cur, next) = (&pair[0], &pair[1]);
        let Some(s) = cur.step_norm else { continue };
        steps.push(DynamicsSlack {
            k: cur.k,
            grad: (l + m) / two * s * s - next.grad_norm,
            // residual differences equal value differences but avoid
            // cancellation where the oracle computes r directly
            decrease: cur.r - m / T::lit(12.0) * s * s * s - next.r,
            eig: (two * l + m) / two * s + next.min_eig,
            tolerance: T::lit(1e-9) * (T::one() + cur.f.abs()),
        });
    }
    let fold = |pick: fn(&DynamicsSlack<T>) -> T| steps.iter().map(pick).fold(T::infinity(), T::min);
    DynamicsReport {
        min_grad: fold(|s| s.grad),
        min_decrease: fold(|s| s.decrease),
        min_eig: fold(|s| s.eig),
        violations: steps.iter().filter(|s| !s.holds()).count(),
        steps,
    }
}

/// `‖x_{k+1} − x_k‖ − μ(x_{k+1})` for every step. The bound holds for the
/// gap at the iterate a step lands on.
pub fn mu_chain_slacks<T: Scalar>(trace: &CRTrace<T>) -> Vec<T> {
    trace
        .records
        .windows(2)
        .filter_map(|p| p[0].step_norm.map(|s| s - p[1].mu_gap))
        .collect()
}

/// `Δ_k = Σ_{i≥k} ‖x_{i+1} − x_i‖`, one entry per record (the last is 0).
pub fn tail_lengths<T: Scalar>(trace: &CRTrace<T>) -> Vec<T> {
    let mut out = vec![T::zero(); trace.len()];
    let mut acc = T::zero();
    for (i, rec) in trace.records.iter().enumerate().rev() {
        acc += rec.step_norm.unwrap_or(T::zero());
        out[i] = acc;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;
    use crate::zoo::{PowerNorm, Quadratic, SaddleConfined};

    fn half_square() -> Quadratic<f64> {
        Quadratic::new(SymMatrix::<f64>::identity(1), Point::zeros(1)).unwrap()
    }

    #[test]
    fn quadratic_iterates_follow_closed_form() {
        // 1-D step: s = (1 − √(1 + 2Mx))/M for x > 0
        let f = half_square();
        let trace = run_cr(&f, &Point::from(vec![1.0]), &CRConfig { store_points: true, ..CRConfig::new(1.0) }).unwrap();
        let pts = trace.points.as_ref().unwrap();
        let mut x: f64 = 1.0;
        for p in pts.iter().take(5) {
            assert!((p[0] - x).abs() <= 1e-15 * (1.0 + x.abs()), "{} vs {x}", p[0]);
            x += (1.0 - (1.0 + 2.0 * x).sqrt()) / 1.0;
        }
        // high-precision evaluation of the same recurrence
        let oracle = [0.267949192431122706, 0.0286355175036468042, 3.98660059169856607e-4, 7.94332576762727205e-8];
        for (p, want) in pts[1..].iter().zip(oracle) {
            assert!((p[0] - want).abs() <= 1e-11 * want, "{} vs {want}", p[0]);
        }
        assert_eq!(trace.terminated_by, Termination::GradAndEigTol);
    }

    #[test]
    fn cubic_norm_ratio() {
        let f = PowerNorm::<f64>::new(1, 3.0, 1.0).unwrap();
        let cfg = CRConfig { max_iters: 12, store_points: true, ..CRConfig::new(6.0) };
        let trace = run_cr(&f, &Point::from(vec![1.0]), &cfg).unwrap();
        let pts = trace.points.unwrap();
        let ratio = 2.0 - 2f64.sqrt();
        for w in pts.windows(2) {
            assert!((w[1][0] / w[0][0] - ratio).abs() < 1e-10);
        }
        let r = &trace.records;
        assert!((r[5].r / r[4].r - ratio.powi(3)).abs() < 1e-9);
    }

    #[test]
    fn start_at_minimizer() {
        let q = SymMatrix::<f64>::from_rows(vec![vec![2.0, 0.3], vec![0.3, 1.0]]).unwrap();
        let f = Quadratic::new(q, Point::from(vec![1.0, -1.0])).unwrap();
        let trace = run_cr(&f, f.minimizer(), &CRConfig::new(1.0)).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.records[0].k, 0);
        assert!(trace.records[0].step_norm.is_none());
        assert_eq!(trace.terminated_by, Termination::GradAndEigTol);
        assert_eq!(stationarity_gap(&f, f.minimizer(), 0.0, 1.0), mu_from_parts(trace.records[0].grad_norm, 1.0, 0.0, 1.0));
    }

    #[test]
    fn dynamics_hold_on_quadratic_and_quartic() {
        let f = half_square();
        let trace = run_cr(&f, &Point::from(vec![1.0]), &CRConfig::new(0.3)).unwrap();
        assert!(dynamics_check(&trace, 0.0, 0.3).all_hold());

        let g = PowerNorm::<f64>::new(2, 4.0, 1.0).unwrap();
        let l2 = g.constants().lipschitz_hess;
        let cfg = CRConfig { max_iters: 300, ..CRConfig::new(l2) };
        let trace = run_cr(&g, &Point::from(vec![0.6, 0.8]), &cfg).unwrap();
        let rep = dynamics_check(&trace, l2, l2);
        assert!(rep.all_hold(), "{:?}", (rep.min_grad, rep.min_decrease, rep.min_eig));
    }

    #[test]
    fn undersized_m_is_reported_not_fatal() {
        let g = PowerNorm::<f64>::new(1, 4.0, 1.0).unwrap();
        let l2 = g.constants().lipschitz_hess;
        let cfg = CRConfig { max_iters: 50, ..CRConfig::new(l2 / 10.0) };
        let trace = run_cr(&g, &Point::from(vec![1.0]), &cfg).unwrap();
        let rep = dynamics_check(&trace, l2, l2 / 10.0);
        assert_eq!(rep.steps.len(), 50);
    }

    #[test]
    fn saddle_gap_at_origin() {
        let f = SaddleConfined::new(SymMatrix::<f64>::from_diag(&[-1.0, 1.0]), 1.0).unwrap();
        let l = f.constants().lipschitz_hess;
        let m = 2.0 * l;
        let mu = stationarity_gap(&f, &Point::zeros(2), l, m);
        assert!((mu - 2.0 / (2.0 * l + m)).abs() < 1e-15);
    }

    #[test]
    fn mu_chain_is_shifted_by_one() {
        let f = half_square();
        let trace = run_cr(&f, &Point::from(vec![1.0]), &CRConfig::new(1.0)).unwrap();
        assert!(mu_chain_slacks(&trace).iter().all(|&s| s >= -1e-9));
        // the same-index comparison fails on the very first step
        let r0 = &trace.records[0];
        assert!(r0.mu_gap > r0.step_norm.unwrap());
        assert!((r0.mu_gap - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn tail_lengths_telescoping() {
        let f = half_square();
        let trace = run_cr(&f, &Point::from(vec![1.0]), &CRConfig::new(1.0)).unwrap();
        let tails = tail_lengths(&trace);
        assert_eq!(*tails.last().unwrap(), 0.0);
        for (k, rec) in trace.records.iter().enumerate() {
            assert!(tails[k] >= rec.dist_to_final - 1e-15);
            assert!(tails[k] >= rec.dist - 1e-8);
            if let Some(s) = rec.step_norm {
                assert!((tails[k] - tails[k + 1] - s).abs() <= f64::EPSILON * tails[k]);
            }
        }
    }

    #[test]
    fn single_step_tail() {
        let trace = CRTrace {
            records: vec![
                CRTraceRecord {
                    k: 0,
                    f: 1.0,
                    r: 1.0,
                    grad_norm: 1.0,
                    min_eig: 0.0,
                    step_norm: Some(0.5),
                    mu_gap: 0.0,
                    dist: 0.5,
                    dist_to_final: 0.5,
                    dist_to_limit: 0.5,
                },
                CRTraceRecord {
                    k: 1,
                    f: 0.0,
                    r: 0.0,
                    grad_norm: 0.0,
                    min_eig: 0.0,
                    step_norm: None,
                    mu_gap: 0.0,
                    dist: 0.0,
                    dist_to_final: 0.0,
                    dist_to_limit: 0.0,
                },
            ],
            terminated_by: Termination::GradAndEigTol,
            oracle_id: "manual".into(),
            config: CRConfig::new(1.0),
            lipschitz_hess: 0.0,
            final_point: Point::zeros(1),
            points: None,
        };
        assert_eq!(tail_lengths(&trace), vec![0.5, 0.0]);
    }

    #[test]
    fn ball_violation_aborts() {
        let g = PowerNorm::<f64>::new(1, 4.0, 1.0).unwrap().with_radius(1.0).unwrap();
        let err = run_cr(&g, &Point::from(vec![2.0]), &CRConfig::new(1.0)).unwrap_err();
        assert!(matches!(err, Error::BallViolation { iter: 0, .. }));
    }

    #[test]
    fn config_validation() {
        assert!(CRConfig::<f64>::new(0.0).validate().is_err());
        assert!(CRConfig { max_iters: 0, ..CRConfig::<f64>::new(1.0) }.validate().is_err());
        assert!(CRConfig { subsolver_tol: 1e-3, ..CRConfig::<f64>::new(1.0) }.validate().is_err());
        assert_eq!(default_m(0.0), 10.0);
        assert_eq!(default_m(3.0), 6.0);
    }
}
