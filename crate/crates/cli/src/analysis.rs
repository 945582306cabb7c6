//! Rate reports and monitor verdicts for finished traces.

use kloptim::cr::{dynamics_check, mu_chain_slacks, tail_lengths};
use kloptim::gda::{limit_criticality, lyapunov_decrease_check, ystar_contraction_check};
use kloptim::kl::{classify_rate, estimate_theta, predict_rates, Family, RateReport, ThetaEstimate};
use kloptim::{CRTrace64, GDATrace64, MinimaxOracle, SmoothOracle};
use serde::Serialize;

/// Entries below zero (round-off in `f − f*`) are clamped; a trailing
/// entry measured against the run's own final point is dropped, since its
/// exact zero says nothing about the rate.
pub fn error_sequence(values: &[f64], self_referenced: bool) -> Vec<f64> {
    let n = if self_referenced { values.len().saturating_sub(1) } else { values.len() };
    values[..n].iter().map(|&v| v.max(0.0)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceReport {
    pub name: String,
    pub family: Option<Family>,
    pub report: Option<RateReport>,
    /// Why no report could be produced.
    pub error: Option<String>,
}

impl SequenceReport {
    pub fn analyze(name: &str, errors: &[f64], family: Option<Family>, theta: Option<f64>) -> Self {
        let prediction = match (family, theta) {
            (Some(fam), Some(t)) => predict_rates(t, fam).ok(),
            _ => None,
        };
        match classify_rate(errors, None) {
            Ok(rep) => Self {
                name: name.into(),
                family,
                report: Some(match prediction {
                    Some(p) => rep.with_prediction(p),
                    None => rep,
                }),
                error: None,
            },
            Err(e) => Self { name: name.into(), family, report: None, error: Some(e.to_string()) },
        }
    }

    pub fn class(&self) -> Option<kloptim::kl::RateClass> {
        self.report.as_ref().map(|r| r.class)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaSource {
    Oracle,
    Estimated,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrMonitors {
    /// `M ≥ L₂`, the regime in which the dynamics inequalities are guaranteed.
    pub compliant: bool,
    pub lipschitz_hess: f64,
    pub min_grad_slack: f64,
    pub min_decrease_slack: f64,
    pub min_eig_slack: f64,
    pub dynamics_violations: usize,
    pub min_mu_chain_slack: f64,
    pub mu_chain_violations: usize,
    /// Steps landing where `‖∇f‖` is at round-off level, excluded from the chain.
    pub mu_chain_skipped: usize,
    /// `Σ_k ‖x_{k+1} − x_k‖`
    pub total_length: f64,
    /// Steps where the tail length falls short of the distance to the final iterate.
    pub tail_violations: usize,
}

impl CrMonitors {
    /// Violations are reported whether or not `M ≥ L₂`; outside that regime
    /// they are expected rather than bugs.
    pub fn hard_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.dynamics_violations > 0 {
            out.push(format!("{} CR dynamics violations", self.dynamics_violations));
        }
        if self.mu_chain_violations > 0 {
            out.push(format!("{} mu-gap chain violations", self.mu_chain_violations));
        }
        if self.tail_violations > 0 || !self.total_length.is_finite() {
            out.push(format!("{} finite-length violations", self.tail_violations));
        }
        out
    }
}

pub const MU_CHAIN_TOL: f64 = 1e-9;
/// Below `1e-12·(1 + |f|)` a computed gradient norm is rounding noise, and
/// the square root inside `μ` inflates that noise to ~1e-8.
pub const GRAD_ROUNDOFF: f64 = 1e-12;
pub const TAIL_TOL: f64 = 1e-8;

pub fn cr_monitors(trace: &CRTrace64, m: f64) -> CrMonitors {
    let l2 = trace.lipschitz_hess;
    let dyn_rep = dynamics_check(trace, l2, m);
    let landed: Vec<_> = trace.records.windows(2).filter(|w| w[0].step_norm.is_some()).map(|w| w[1]).collect();
    let all = mu_chain_slacks(trace);
    let noise = |r: &kloptim::CRTraceRecord<f64>| r.grad_norm <= GRAD_ROUNDOFF * (1.0 + r.f.abs()) && r.min_eig >= 0.0;
    let chain: Vec<f64> = all.iter().zip(&landed).filter(|(_, r)| !noise(r)).map(|(s, _)| *s).collect();
    let tails = tail_lengths(trace);
    let tail_violations = tails
        .iter()
        .zip(&trace.records)
        .filter(|(t, r)| **t < r.dist_to_final - TAIL_TOL)
        .count();
    CrMonitors {
        compliant: m >= l2,
        lipschitz_hess: l2,
        min_grad_slack: dyn_rep.min_grad,
        min_decrease_slack: dyn_rep.min_decrease,
        min_eig_slack: dyn_rep.min_eig,
        dynamics_violations: dyn_rep.violations,
        min_mu_chain_slack: chain.iter().copied().fold(f64::INFINITY, f64::min),
        mu_chain_violations: chain.iter().filter(|&&s| s < -MU_CHAIN_TOL).count(),
        mu_chain_skipped: all.len() - chain.len(),
        total_length: tails.first().copied().unwrap_or(0.0),
        tail_violations,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrAnalysis {
    pub theta: Option<f64>,
    pub theta_source: ThetaSource,
    pub theta_estimate: Option<ThetaEstimate>,
    pub sequences: Vec<SequenceReport>,
}

impl CrAnalysis {
    pub fn sequence(&self, name: &str) -> &SequenceReport {
        self.sequences.iter().find(|s| s.name == name).expect("known sequence name")
    }
}

/// Reports for `r`, `dist_to_limit`, `dist` and `mu_gap`.
pub fn analyze_cr(trace: &CRTrace64, oracle: &dyn SmoothOracle<f64>) -> CrAnalysis {
    let pairs: Vec<(f64, f64)> = trace.records.iter().map(|r| (r.r, r.grad_norm)).collect();
    let theta_estimate = estimate_theta(&pairs, None).ok();
    let (theta, theta_source) = match (oracle.constants().kl_theta, theta_estimate) {
        (Some(t), _) => (Some(t), ThetaSource::Oracle),
        (None, Some(est)) if !est.degenerate => (Some(est.theta_hat), ThetaSource::Estimated),
        _ => (None, ThetaSource::Unknown),
    };
    let limit_known = oracle.nearest_solution(&trace.final_point).is_some();
    let seqs = [
        ("r", Some(Family::CrValue), trace.column(|r| r.r), false),
        ("dist_to_limit", Some(Family::CrVariable), trace.column(|r| r.dist_to_limit), !limit_known),
        ("dist", Some(Family::CrDistance), trace.column(|r| r.dist), false),
        ("mu_gap", None, trace.column(|r| r.mu_gap), false),
    ];
    let sequences = seqs
        .into_iter()
        .map(|(name, fam, vals, self_ref)| SequenceReport::analyze(name, &error_sequence(&vals, self_ref), fam, theta))
        .collect();
    CrAnalysis { theta, theta_source, theta_estimate, sequences }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GdaMonitors {
    /// Learning rates no larger than the defaults, where the decrease is guaranteed.
    pub compliant: bool,
    pub min_lyapunov_slack: f64,
    pub lyapunov_violations: usize,
    pub max_contraction_ratio: f64,
    pub contraction_bound: f64,
    pub contraction_violations: usize,
    /// `dist(0, ∇Φ(x̂) + ∂g(x̂))` at the final iterate.
    pub limit_criticality: f64,
    pub final_x_step: f64,
    pub final_y_step: f64,
    pub final_y_gap: f64,
}

impl GdaMonitors {
    pub fn hard_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.lyapunov_violations > 0 {
            out.push(format!("{} Lyapunov decrease violations", self.lyapunov_violations));
        }
        if self.contraction_violations > 0 {
            out.push(format!("{} y* contraction violations", self.contraction_violations));
        }
        out
    }
}

pub fn gda_monitors(trace: &GDATrace64, oracle: &dyn MinimaxOracle<f64>, default_rates: (f64, f64)) -> GdaMonitors {
    let lyap = lyapunov_decrease_check(trace, oracle);
    let contraction = ystar_contraction_check(oracle, trace, trace.config.eta_y);
    // the last record carries no step; report the last step taken
    let last_step = trace.records.iter().rev().find(|r| r.x_step_norm.is_some());
    GdaMonitors {
        compliant: trace.config.eta_x <= default_rates.0 && trace.config.eta_y <= default_rates.1,
        min_lyapunov_slack: lyap.min_slack,
        lyapunov_violations: lyap.violations,
        max_contraction_ratio: contraction.max_ratio,
        contraction_bound: contraction.bound,
        contraction_violations: contraction.violations,
        limit_criticality: limit_criticality(oracle, &trace.final_x),
        final_x_step: last_step.and_then(|r| r.x_step_norm).unwrap_or(0.0),
        final_y_step: last_step.and_then(|r| r.y_step_norm).unwrap_or(0.0),
        final_y_gap: trace.last().y_gap,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GdaAnalysis {
    pub theta: Option<f64>,
    pub sequences: Vec<SequenceReport>,
}

impl GdaAnalysis {
    pub fn sequence(&self, name: &str) -> &SequenceReport {
        self.sequences.iter().find(|s| s.name == name).expect("known sequence name")
    }
}

/// Reports for `H − H*`, `dist_x` and `dist_y`. Without a known minimizer
/// the final iterate stands in for the limit.
pub fn analyze_gda(trace: &GDATrace64, oracle: &dyn MinimaxOracle<f64>) -> GdaAnalysis {
    let theta = oracle.kl_theta();
    let known = trace.h_star.is_some();
    let h_star = trace.h_star.unwrap_or(trace.last().h);
    let seqs = [
        ("H_gap", Family::GdaValue, trace.column(|r| r.h - h_star)),
        ("dist_x", Family::GdaVariable, trace.column(|r| r.dist_x)),
        ("dist_y", Family::GdaVariable, trace.column(|r| r.dist_y)),
    ];
    let sequences = seqs
        .into_iter()
        .map(|(name, fam, vals)| SequenceReport::analyze(name, &error_sequence(&vals, !known), Some(fam), theta))
        .collect();
    GdaAnalysis { theta, sequences }
}
