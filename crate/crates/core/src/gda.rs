//! Proximal gradient descent-ascent for
//! `min_x max_{y∈Y} f(x, y) + g(x) − h(y)`:
//!
//! ```text
//! x_{t+1} = prox_{η_x g}(x_t − η_x ∇₁f(x_t, y_t))
//! y_{t+1} = prox_{η_y h}(y_t + η_y ∇₂f(x_t, y_t))
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, input, Error, Result};
use crate::linalg::Point;
use crate::zoo::MinimaxOracle;
use crate::Scalar;

/// Consecutive small steps required before stopping.
pub const SMALL_STEP_RUN: usize = 3;
/// Small enough that the limit is critical to ~1e-7 on the zoo instances,
/// large enough that the final 10% of a linearly converging run stays
/// within 10× of it.
pub const DEFAULT_STEP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GDAConfig<T> {
    pub eta_x: T,
    pub eta_y: T,
    pub max_iters: usize,
    pub step_tol: T,
}

impl<T: Scalar> GDAConfig<T> {
    /// Default rates for the oracle's `L` and `μ`.
    pub fn for_oracle<O: MinimaxOracle<T> + ?Sized>(oracle: &O) -> Result<Self> {
        let k = oracle.constants();
        let (eta_x, eta_y) = default_learning_rates(k.lipschitz, k.mu)?;
        Ok(Self { eta_x, eta_y, max_iters: 10_000, step_tol: T::lit(DEFAULT_STEP_TOL) })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.into()));
        if !(self.eta_x > T::zero() && self.eta_x.is_finite() && self.eta_y > T::zero() && self.eta_y.is_finite()) {
            return bad("learning rates must be positive and finite");
        }
        if self.max_iters == 0 || self.max_iters > 1_000_000 {
            return bad("max_iters must lie in 1..=1000000");
        }
        if !(self.step_tol > T::zero()) {
            return bad("step_tol must be positive");
        }
        Ok(())
    }
}

/// `(1/(κ³(L+3)²), 1/L)` with `κ = L/μ`.
pub fn default_learning_rates<T: Scalar>(l: T, mu: T) -> Result<(T, T)> {
    if !(mu > T::zero()) {
        return input("mu must be positive");
    }
    if !(l >= mu) || !l.is_finite() {
        return input("L must be finite and at least mu (condition number below 1)");
    }
    let kappa = l / mu;
    let l3 = l + T::lit(3.0);
    Ok((T::one() / (kappa * kappa * kappa * l3 * l3), T::one() / l))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GDATraceRecord<T> {
    pub t: usize,
    /// Lyapunov value `H(z_t)`.
    pub h: T,
    pub phi_plus_g: T,
    /// `‖x_{t+1} − x_t‖`; `None` on the last record.
    pub x_step_norm: Option<T>,
    pub y_step_norm: Option<T>,
    /// `‖y_t − y*(x_t)‖`
    pub y_gap: T,
    /// `‖y_{t+1} − y*(x_t)‖`, the gap after the ascent step.
    pub ascent_gap: Option<T>,
    /// `‖x_t − x*‖` for the known minimizer, else `‖x_t − x_final‖`.
    pub dist_x: T,
    /// `‖y_t − y*(x*)‖`, else `‖y_t − y_final‖`.
    pub dist_y: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GDATermination {
    StepTol,
    /// Both steps were exactly zero.
    FixedPoint,
    MaxIters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GDATrace<T> {
    pub records: Vec<GDATraceRecord<T>>,
    pub terminated_by: GDATermination,
    pub oracle_id: String,
    pub config: GDAConfig<T>,
    pub kappa: T,
    /// `(Φ + g)(x*)` when the minimizer is known.
    pub h_star: Option<T>,
    pub final_x: Point<T>,
    pub final_y: Point<T>,
}

impl<T: Scalar> GDATrace<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> &GDATraceRecord<T> {
        self.records.last().expect("trace has at least one record")
    }

    pub fn column(&self, pick: impl Fn(&GDATraceRecord<T>) -> T) -> Vec<f64> {
        self.records.iter().map(|r| pick(r).to_f64_lossy()).collect()
    }
}

/// `H(z) = Φ(x) + g(x) + (1 − 1/(4κ²))·‖y − y*(x)‖²`
pub fn lyapunov<T: Scalar, O: MinimaxOracle<T> + ?Sized>(oracle: &O, x: &Point<T>, y: &Point<T>) -> T {
    let gap = y.dist(&oracle.y_star(x));
    oracle.phi_plus_g(x) + lyapunov_weight(oracle.constants().kappa) * gap * gap
}

fn lyapunov_weight<T: Scalar>(kappa: T) -> T {
    T::one() - T::one() / (T::lit(4.0) * kappa * kappa)
}

pub fn run_prox_gda<T: Scalar, O: MinimaxOracle<T> + ?Sized>(
    oracle: &O,
    x0: &Point<T>,
    y0: &Point<T>,
    config: &GDAConfig<T>,
) -> Result<GDATrace<T>> {
    config.validate()?;
    check_dim(oracle.dim_x(), x0.dim())?;
    check_dim(oracle.dim_y(), y0.dim())?;
    if !x0.is_finite() || !y0.is_finite() {
        return input("starting point is not finite");
    }
    let kappa = oracle.constants().kappa;
    let weight = lyapunov_weight(kappa);
    let (eta_x, eta_y) = (config.eta_x, config.eta_y);
    let mut x = x0.clone();
    // prox of an indicator is the projection for any step
    let mut y = oracle.prox_h().apply(y0, eta_y)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut records = Vec::new();
    let mut small = 0;
    let mut t = 0;
    let terminated_by = loop {
        if !oracle.y_star_interior(&x) {
            return Err(Error::Config(format!(
                "y*(x_t) left the interior of Y at t = {t}; enlarge y_radius"
            )));
        }
        let y_opt = oracle.y_star(&x);
        let y_gap = y.dist(&y_opt);
        let phi_plus_g = oracle.phi_plus_g(&x);
        let mut rec = GDATraceRecord {
            t,
            h: phi_plus_g + weight * y_gap * y_gap,
            phi_plus_g,
            x_step_norm: None,
            y_step_norm: None,
            y_gap,
            ascent_gap: None,
            dist_x: T::zero(),
            dist_y: T::zero(),
        };
        xs.push(x.clone());
        ys.push(y.clone());
        if small >= SMALL_STEP_RUN {
            records.push(rec);
            break GDATermination::StepTol;
        }
        if t == config.max_iters {
            records.push(rec);
            break GDATermination::MaxIters;
        }
        let mut xv = x.clone();
        xv.axpy(-eta_x, &oracle.grad_x(&x, &y));
        let x_next = oracle.prox_g().apply(&xv, eta_x)?;
        let mut yv = y.clone();
        yv.axpy(eta_y, &oracle.grad_y(&x, &y));
        let y_next = oracle.prox_h().apply(&yv, eta_y)?;
        if !x_next.is_finite() || !y_next.is_finite() {
            return Err(Error::Numerical(format!("iterate became non-finite at t = {}", t + 1)));
        }
        let (sx, sy) = (x_next.dist(&x), y_next.dist(&y));
        rec.x_step_norm = Some(sx);
        rec.y_step_norm = Some(sy);
        rec.ascent_gap = Some(y_next.dist(&y_opt));
        records.push(rec);
        small = if sx <= config.step_tol && sy <= config.step_tol { small + 1 } else { 0 };
        x = x_next;
        y = y_next;
        t += 1;
        if sx == T::zero() && sy == T::zero() {
            xs.push(x.clone());
            ys.push(y.clone());
            records.push(GDATraceRecord { t, x_step_norm: None, y_step_norm: None, ascent_gap: None, ..rec });
            break GDATermination::FixedPoint;
        }
    };

    let x_star = oracle.minimizer();
    let h_star = x_star.as_ref().map(|p| oracle.phi_plus_g(p));
    let x_ref = x_star.clone().unwrap_or_else(|| x.clone());
    let y_ref = x_star.as_ref().map(|p| oracle.y_star(p)).unwrap_or_else(|| y.clone());
    for (rec, (px, py)) in records.iter_mut().zip(xs.iter().zip(&ys)) {
        rec.dist_x = px.dist(&x_ref);
        rec.dist_y = py.dist(&y_ref);
    }
    Ok(GDATrace {
        records,
        terminated_by,
        oracle_id: oracle.name(),
        config: config.clone(),
        kappa,
        h_star,
        final_x: x,
        final_y: y,
    })
}

/// Per-step slack of
/// `H(z_{t+1}) ≤ H(z_t) − 2‖x_{t+1} − x_t‖² − (1/(4κ²))(‖y_{t+1} − y*(x_{t+1})‖² + ‖y_t − y*(x_t)‖²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport<T> {
    pub slacks: Vec<T>,
    pub min_slack: T,
    /// Steps whose slack is below `−1e-12·(1 + |H(z_t)|)`.
    pub violations: usize,
}

pub fn lyapunov_decrease_check<T: Scalar, O: MinimaxOracle<T> + ?Sized>(
    trace: &GDATrace<T>,
    oracle: &O,
) -> LyapunovReport<T> {
    let kappa = oracle.constants().kappa;
    let c = T::one() / (T::lit(4.0) * kappa * kappa);
    let two = T::lit(2.0);
    let mut slacks = Vec::new();
    let mut violations = 0;
    for w in trace.records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let Some(sx) = a.x_step_norm else { continue };
        let slack = a.h - b.h - two * sx * sx - c * (b.y_gap * b.y_gap + a.y_gap * a.y_gap);
        if slack < -T::lit(1e-12) * (T::one() + a.h.abs()) {
            violations += 1;
        }
        slacks.push(slack);
    }
    let min_slack = slacks.iter().copied().fold(T::infinity(), T::min);
    LyapunovReport { slacks, min_slack, violations }
}

/// `‖y_{t+1} − y*(x_t)‖² / ‖y_t − y*(x_t)‖²` per step; steps whose
/// denominator is below `1e-24` are skipped (`None`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport<T> {
    pub ratios: Vec<Option<T>>,
    pub max_ratio: T,
    /// `1 − 1/κ`
    pub bound: T,
    pub violations: usize,
}

pub fn ystar_contraction_check<T: Scalar, O: MinimaxOracle<T> + ?Sized>(
    oracle: &O,
    trace: &GDATrace<T>,
    eta_y: T,
) -> ContractionReport<T> {
    let k = oracle.constants();
    let bound = T::one() - T::one() / k.kappa;
    let applicable = eta_y <= T::one() / k.lipschitz * (T::one() + T::lit(1e-12));
    let ratios: Vec<Option<T>> = trace
        .records
        .iter()
        .filter_map(|r| r.ascent_gap.map(|a| (a, r.y_gap)))
        .map(|(a, g)| if g * g < T::lit(1e-24) { None } else { Some(a * a / (g * g)) })
        .collect();
    let max_ratio = ratios.iter().flatten().copied().fold(T::zero(), T::max);
    let violations = if applicable {
        ratios.iter().flatten().filter(|&&r| r > bound + T::lit(1e-9)).count()
    } else {
        0
    };
    ContractionReport { ratios, max_ratio, bound, violations }
}

/// `dist(0, ∇Φ(x) + ∂g(x))` for the closed-form subdifferentials of the
/// shipped regularizers.
pub fn limit_criticality<T: Scalar, O: MinimaxOracle<T> + ?Sized>(oracle: &O, x: &Point<T>) -> T {
    oracle.prox_g().stationarity_distance(x, &oracle.phi_grad(x))
}
