use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use kloptim::kl::{classify_rate, RateReport};

use crate::analysis::error_sequence;
use crate::csv::{write_text, Table};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutput {
    pub report: RateReport,
    pub plot_script: PathBuf,
}

/// Classifies one column of a trace CSV and writes a gnuplot script next
/// to it. Empty fields (the step after the last iterate) are skipped.
pub fn cmd_fit(trace_csv: &Path, column: &str, burn_in: Option<usize>) -> CliResult<FitOutput> {
    let table = Table::read(trace_csv)?;
    let values: Vec<f64> = table.column(column)?.into_iter().flatten().collect();
    let errors = error_sequence(&values, false);
    let report = classify_rate(&errors, burn_in).map_err(|e| CliError::Schema {
        path: trace_csv.into(),
        msg: format!("column `{column}`: {e}"),
    })?;
    let plot_script = plot_script_path(trace_csv, column);
    write_text(&plot_script, &plot_script_text(trace_csv, &table.headers, column))?;
    Ok(FitOutput { report, plot_script })
}

fn plot_script_path(trace_csv: &Path, column: &str) -> PathBuf {
    let stem = trace_csv.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    trace_csv.with_file_name(format!("{stem}_{column}.gp"))
}

fn plot_script_text(trace_csv: &Path, headers: &[String], column: &str) -> String {
    let data = trace_csv.file_name().and_then(|s| s.to_str()).unwrap_or("trace.csv");
    let c = headers.iter().position(|h| h == column).map_or(2, |i| i + 1);
    let index = &headers[0];
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot -p {}", plot_script_path(Path::new(data), column).display());
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key off");
    let _ = writeln!(s, "set logscale y");
    let _ = writeln!(s, "set multiplot layout 1,2");
    let _ = writeln!(s, "set xlabel '{index}'");
    let _ = writeln!(s, "set ylabel '{column}'");
    let _ = writeln!(s, "plot '{data}' every ::1 using 1:{c} with linespoints");
    let _ = writeln!(s, "set logscale x");
    let _ = writeln!(s, "set xlabel '{index} + 1'");
    let _ = writeln!(s, "plot '{data}' every ::1 using ($1+1):{c} with linespoints");
    let _ = writeln!(s, "unset multiplot");
    s
}

/// `key = value` lines, one per field.
pub fn format_report(r: &RateReport) -> String {
    let mut s = String::new();
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6}"));
    let _ = writeln!(s, "class = {}", r.class);
    let _ = writeln!(s, "linear_ratio = {}", opt(r.linear_ratio));
    let _ = writeln!(s, "sublinear_exponent = {}", opt(r.sublinear_exponent));
    let _ = writeln!(s, "superlinear_order = {}", opt(r.superlinear_order));
    let _ = writeln!(s, "burn_in = {}", r.burn_in);
    let _ = writeln!(s, "window = {}", r.window);
    let _ = writeln!(s, "fit_residual = {:.3e}", r.fit_residual);
    if let Some(k) = r.finite_step_at {
        let _ = writeln!(s, "finite_step_at = {k}");
    }
    if let Some(p) = &r.predicted {
        let _ = writeln!(s, "predicted = {} (theta = {}, {})", p.class, p.theta, p.family);
        if let Some(m) = r.matches_prediction() {
            let _ = writeln!(s, "matches_prediction = {m}");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use kloptim::kl::RateClass;

    fn fixture(dir: &Path, header: &str, rows: impl Iterator<Item = String>) -> PathBuf {
        let path = dir.join("synthetic.csv");
        let mut text = format!("{header}\n");
        for r in rows {
            text.push_str(&r);
            text.push('\n');
        }
        write_text(&path, &text).unwrap();
        path
    }

    #[test]
    fn inverse_quartic_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = fixture(dir.path(), "k,r", (1..=200).map(|k| format!("{k},{:.16e}", (k as f64).powi(-4))));
        let out = cmd_fit(&path, "r", None).unwrap();
        assert_eq!(out.report.class, RateClass::Sublinear);
        assert!((out.report.sublinear_exponent.unwrap() - 4.0).abs() <= 0.2);
        let script = std::fs::read_to_string(&out.plot_script).unwrap();
        assert!(out.plot_script.ends_with("synthetic_r.gp"));
        assert!(script.contains("using 1:2") && script.contains("set logscale x"));
        assert!(format_report(&out.report).starts_with("class = sublinear\n"));
    }

    #[test]
    fn typo_lists_columns() {
        let dir = tempfile::tempdir().unwrap();
        let path = fixture(dir.path(), "k,r,step_norm", (0..5).map(|k| format!("{k},1.0,")));
        match cmd_fit(&path, "rr", None) {
            Err(CliError::MissingColumn { available, .. }) => assert_eq!(available, ["k", "r", "step_norm"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn increasing_column_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = fixture(dir.path(), "k,r", (0..20).map(|k| format!("{k},{}", k + 1)));
        assert!(matches!(cmd_fit(&path, "r", None), Err(CliError::Schema { .. })));
    }
}
