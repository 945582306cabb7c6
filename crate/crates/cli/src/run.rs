use std::path::{Path, PathBuf};
use std::time::Instant;

use kloptim::cr::{default_m, run_cr, CRConfig};
use kloptim::gda::{default_learning_rates, run_prox_gda, GDAConfig};
use kloptim::{CRConfig64, CRTrace64, GDAConfig64, GDATrace64, MinimaxOracle, Point64, SmoothOracle};
use serde::Serialize;

use crate::analysis::{analyze_cr, analyze_gda, cr_monitors, gda_monitors, CrAnalysis, CrMonitors, GdaAnalysis, GdaMonitors};
use crate::config::{Algo, CrParams, ExperimentConfig, GdaParams};
use crate::csv::{write_cr_trace, write_gda_trace, write_points, write_text};
use crate::error::{invalid, CliError, CliResult};
use crate::problems::{build, Problem};

pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const POINTS_FILE: &str = "points.csv";

/// Algorithm settings after defaults were filled in from the oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "algo", rename_all = "snake_case")]
pub enum Resolved {
    Cr(CRConfig64),
    ProxGda(GDAConfig64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "algo", rename_all = "snake_case")]
pub enum Analysis {
    Cr { analysis: CrAnalysis, monitors: CrMonitors },
    ProxGda { analysis: GdaAnalysis, monitors: GdaMonitors },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub resolved: Resolved,
    pub problem_name: String,
    pub iterations: usize,
    pub terminated_by: String,
    /// `f` for CR, `H` for proximal-GDA.
    pub final_value: f64,
    pub final_grad_norm: Option<f64>,
    pub final_step_norm: Option<f64>,
    pub analysis: Analysis,
    pub hard_failures: Vec<String>,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone)]
pub enum Trace {
    Cr(CRTrace64),
    ProxGda(GDATrace64),
}

#[derive(Debug, Clone)]
pub struct ResultBundle {
    pub trace_path: PathBuf,
    pub summary_path: PathBuf,
    pub points_path: Option<PathBuf>,
    pub summary: Summary,
    pub trace: Trace,
}

pub fn resolve_cr(params: &CrParams, oracle: &dyn SmoothOracle<f64>, store_points: bool) -> CliResult<CRConfig64> {
    let mut cfg = CRConfig::new(params.m.unwrap_or_else(|| default_m(oracle.constants().lipschitz_hess)));
    if let Some(v) = params.max_iters {
        cfg.max_iters = v;
    }
    if let Some(v) = params.grad_tol {
        cfg.grad_tol = v;
    }
    if let Some(v) = params.neg_eig_tol {
        cfg.neg_eig_tol = v;
    }
    if let Some(v) = params.subsolver_tol {
        cfg.subsolver_tol = v;
    }
    cfg.store_points = store_points;
    cfg.validate().or_else(|e| invalid(e.to_string()))?;
    Ok(cfg)
}

pub fn resolve_gda(params: &GdaParams, oracle: &dyn MinimaxOracle<f64>) -> CliResult<GDAConfig64> {
    let mut cfg = GDAConfig::for_oracle(oracle)?;
    if let Some(v) = params.eta_x {
        cfg.eta_x = v;
    }
    if let Some(v) = params.eta_y {
        cfg.eta_y = v;
    }
    if let Some(v) = params.max_iters {
        cfg.max_iters = v;
    }
    if let Some(v) = params.step_tol {
        cfg.step_tol = v;
    }
    cfg.validate().or_else(|e| invalid(e.to_string()))?;
    Ok(cfg)
}

fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))
}

/// Runs one experiment and writes `trace.csv` and `summary.json` (plus
/// `points.csv` with `store_points`) into `config.out`.
///
/// With `strict`, monitor hard failures turn into an error after the files
/// are written.
pub fn cmd_run(config: &ExperimentConfig) -> CliResult<ResultBundle> {
    let start = Instant::now();
    let problem = build(&config.problem, config.seed)?;
    create_dir(&config.out)?;
    let trace_path = config.out.join(TRACE_FILE);
    let summary_path = config.out.join(SUMMARY_FILE);
    let mut points_path = None;
    let problem_name = problem.name();

    let (summary_parts, trace) = match (&problem, config.algo) {
        (Problem::Smooth { oracle, x0 }, Algo::Cr) => {
            let cfg = resolve_cr(&config.cr, oracle.as_ref(), config.store_points)?;
            let trace = run_cr(oracle.as_ref(), x0, &cfg)?;
            write_cr_trace(&trace_path, &trace)?;
            if let Some(points) = &trace.points {
                let p = config.out.join(POINTS_FILE);
                write_points(&p, "k", points)?;
                points_path = Some(p);
            }
            let monitors = cr_monitors(&trace, cfg.m);
            let analysis = analyze_cr(&trace, oracle.as_ref());
            let last = trace.last();
            let step = trace.records.iter().rev().find_map(|r| r.step_norm);
            let parts = (
                Resolved::Cr(cfg),
                format!("{:?}", trace.terminated_by),
                last.f,
                Some(last.grad_norm),
                step,
                monitors.hard_failures(),
                Analysis::Cr { analysis, monitors },
            );
            (parts, Trace::Cr(trace))
        }
        (Problem::Minimax { oracle, x0, y0 }, Algo::ProxGda) => {
            let cfg = resolve_gda(&config.prox_gda, oracle.as_ref())?;
            let trace = run_prox_gda(oracle.as_ref(), x0, y0, &cfg)?;
            write_gda_trace(&trace_path, &trace)?;
            if config.store_points {
                let p = config.out.join(POINTS_FILE);
                let xs: Vec<Point64> = replay_gda_x(oracle.as_ref(), x0, y0, &cfg, trace.len())?;
                write_points(&p, "t", &xs)?;
                points_path = Some(p);
            }
            let k = oracle.constants();
            let defaults = default_learning_rates(k.lipschitz, k.mu)?;
            let monitors = gda_monitors(&trace, oracle.as_ref(), defaults);
            let analysis = analyze_gda(&trace, oracle.as_ref());
            let last = trace.last();
            let step = trace.records.iter().rev().find_map(|r| r.x_step_norm);
            let parts = (
                Resolved::ProxGda(cfg),
                format!("{:?}", trace.terminated_by),
                last.h,
                None,
                step,
                monitors.hard_failures(),
                Analysis::ProxGda { analysis, monitors },
            );
            (parts, Trace::ProxGda(trace))
        }
        (Problem::Smooth { .. }, Algo::ProxGda) => {
            return invalid(format!("{} is a minimization problem; use --algo cr", config.problem))
        }
        (Problem::Minimax { .. }, Algo::Cr) => {
            return invalid(format!("{} is a minimax problem; use --algo prox-gda", config.problem))
        }
    };
    let (resolved, terminated_by, final_value, final_grad_norm, final_step_norm, hard_failures, analysis) = summary_parts;
    let iterations = match &trace {
        Trace::Cr(t) => t.len() - 1,
        Trace::ProxGda(t) => t.len() - 1,
    };
    let summary = Summary {
        config: config.clone(),
        resolved,
        problem_name,
        iterations,
        terminated_by,
        final_value,
        final_grad_norm,
        final_step_norm,
        analysis,
        hard_failures,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| CliError::InvalidParams(e.to_string()))?;
    write_text(&summary_path, &(json + "\n"))?;
    if config.strict && !summary.hard_failures.is_empty() {
        return Err(CliError::Monitor(summary.hard_failures.join("; ")));
    }
    Ok(ResultBundle { trace_path, summary_path, points_path, summary, trace })
}

/// The GDA trace keeps scalars only; iterates are regenerated on request
/// by replaying the (deterministic) run.
fn replay_gda_x(
    oracle: &dyn MinimaxOracle<f64>,
    x0: &Point64,
    y0: &Point64,
    cfg: &GDAConfig64,
    n: usize,
) -> CliResult<Vec<Point64>> {
    let (mut x, mut y) = (x0.clone(), oracle.prox_h().apply(y0, cfg.eta_y)?);
    let mut out = vec![x.clone()];
    while out.len() < n {
        let mut xv = x.clone();
        xv.axpy(-cfg.eta_x, &oracle.grad_x(&x, &y));
        let mut yv = y.clone();
        yv.axpy(cfg.eta_y, &oracle.grad_y(&x, &y));
        x = oracle.prox_g().apply(&xv, cfg.eta_x)?;
        y = oracle.prox_h().apply(&yv, cfg.eta_y)?;
        out.push(x.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use kloptim::kl::RateClass;

    fn run(problem: &str, algo: Algo) -> (tempfile::TempDir, ResultBundle) {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::new(problem, algo, dir.path().join("run"));
        let bundle = cmd_run(&cfg).unwrap();
        (dir, bundle)
    }

    #[test]
    fn quad_run_writes_files_and_is_superlinear() {
        let (_dir, b) = run("quad:cond=100", Algo::Cr);
        assert!(b.trace_path.exists() && b.summary_path.exists());
        let Analysis::Cr { analysis, monitors } = &b.summary.analysis else { panic!() };
        assert_eq!(analysis.sequence("r").class(), Some(RateClass::Superlinear));
        assert!(monitors.compliant && monitors.dynamics_violations == 0);
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&b.summary_path).unwrap()).unwrap();
        assert_eq!(json["resolved"]["m"], 10.0);
        assert_eq!(json["resolved"]["max_iters"], 10_000);
    }

    #[test]
    fn bilinear_run_is_linear() {
        let (_dir, b) = run("bilinear:1d", Algo::ProxGda);
        let Analysis::ProxGda { analysis, monitors } = &b.summary.analysis else { panic!() };
        assert_eq!(analysis.sequence("H_gap").class(), Some(RateClass::Linear));
        assert!(monitors.min_lyapunov_slack >= -1e-12);
    }

    #[test]
    fn wrong_algorithm_is_invalid() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::new("bilinear:1d", Algo::Cr, dir.path());
        assert!(matches!(cmd_run(&cfg), Err(CliError::InvalidParams(_))));
    }

    #[test]
    fn stored_gda_points_match_trace() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::new("bilinear:d=3", Algo::ProxGda, dir.path());
        cfg.store_points = true;
        cfg.prox_gda.max_iters = Some(40);
        let b = cmd_run(&cfg).unwrap();
        let table = crate::csv::Table::read(b.points_path.as_ref().unwrap()).unwrap();
        let Trace::ProxGda(t) = &b.trace else { panic!() };
        assert_eq!(table.rows.len(), t.len());
    }
}
