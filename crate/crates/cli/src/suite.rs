use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{Context, Outcome, CRITERIA};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub jobs: Option<usize>,
    /// Substring matched against criterion names; numbers match ids exactly.
    pub filter: Option<String>,
    pub out: PathBuf,
    pub inject_subsolver_fault: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub id: u32,
    pub name: &'static str,
    pub outcome: Option<Outcome>,
    /// Set when the criterion could not run at all.
    pub error: Option<String>,
    pub secs: f64,
}

impl SuiteRow {
    pub fn pass(&self) -> bool {
        self.outcome.as_ref().is_some_and(|o| o.pass)
    }
}

fn selected(filter: &Option<String>, id: u32, name: &str) -> bool {
    match filter.as_deref().map(str::trim) {
        None | Some("") => true,
        Some(f) => match f.parse::<u32>() {
            Ok(n) => n == id,
            Err(_) => name.contains(f),
        },
    }
}

/// Runs the selected criteria, at most `jobs` at a time. A criterion that
/// errors becomes a failing row; the others still run.
pub fn cmd_suite(opts: &SuiteOptions) -> CliResult<Vec<SuiteRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::InvalidParams(format!("--jobs: {e}")))?;
    let chosen: Vec<_> = CRITERIA.iter().filter(|c| selected(&opts.filter, c.id, c.name)).collect();
    let rows = pool.install(|| {
        chosen
            .par_iter()
            .map(|c| {
                let ctx = Context {
                    work_dir: opts.out.join(format!("{:02}-{}", c.id, c.name)),
                    inject_subsolver_fault: opts.inject_subsolver_fault,
                };
                let start = std::time::Instant::now();
                let (outcome, error) = match (c.check)(&ctx) {
                    Ok(o) => (Some(o), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                SuiteRow { id: c.id, name: c.name, outcome, error, secs: start.elapsed().as_secs_f64() }
            })
            .collect()
    });
    Ok(rows)
}

pub fn format_table(rows: &[SuiteRow]) -> String {
    let mut s = String::new();
    for r in rows {
        let verdict = if r.pass() { "PASS" } else { "FAIL" };
        match (&r.outcome, &r.error) {
            (Some(o), _) => {
                let _ = writeln!(
                    s,
                    "{verdict} {:>2} {:<28} observed: {} | expected: {} | tol: {} ({:.2}s)",
                    r.id, r.name, o.observed, o.expected, o.tolerance, r.secs
                );
            }
            (None, e) => {
                let _ = writeln!(s, "{verdict} {:>2} {:<28} error: {}", r.id, r.name, e.as_deref().unwrap_or("?"));
            }
        }
    }
    s
}
