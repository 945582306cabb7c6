//! Trace CSVs. Floats use 17 significant digits (`{:.16e}`) so a trace
//! round-trips bit-exactly; a step that was never taken is an empty field.

use std::io::Write;
use std::path::{Path, PathBuf};

use kloptim::{CRTrace64, GDATrace64, Point64};

use crate::error::{CliError, CliResult};

pub const CR_HEADER: [&str; 8] = ["k", "f", "r", "grad_norm", "min_eig", "step_norm", "mu_gap", "dist"];
pub const GDA_HEADER: [&str; 7] = ["t", "H", "phi_plus_g", "x_step_norm", "y_step_norm", "y_gap", "dist_x"];

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> CliResult<()> {
    let io = CliError::io(path);
    let mut w = ::csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    w.write_record(header).map_err(|e| csv_io(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_io(path, e))?;
    }
    w.flush().map_err(io)
}

fn csv_io(path: &Path, e: ::csv::Error) -> CliError {
    match e.into_kind() {
        ::csv::ErrorKind::Io(source) => CliError::Io { path: path.into(), source },
        other => CliError::Schema { path: path.into(), msg: format!("{other:?}") },
    }
}

pub fn write_cr_trace(path: &Path, trace: &CRTrace64) -> CliResult<()> {
    let rows = trace.records.iter().map(|r| {
        vec![
            r.k.to_string(),
            num(r.f),
            num(r.r),
            num(r.grad_norm),
            num(r.min_eig),
            opt(r.step_norm),
            num(r.mu_gap),
            num(r.dist),
        ]
    });
    write_rows(path, &CR_HEADER, rows)
}

pub fn write_gda_trace(path: &Path, trace: &GDATrace64) -> CliResult<()> {
    let rows = trace.records.iter().map(|r| {
        vec![
            r.t.to_string(),
            num(r.h),
            num(r.phi_plus_g),
            opt(r.x_step_norm),
            opt(r.y_step_norm),
            num(r.y_gap),
            num(r.dist_x),
        ]
    });
    write_rows(path, &GDA_HEADER, rows)
}

/// `index,x0,x1,...`, one row per iterate.
pub fn write_points(path: &Path, index: &str, points: &[Point64]) -> CliResult<()> {
    let d = points.first().map_or(0, Point64::dim);
    let mut header = vec![index.to_string()];
    header.extend((0..d).map(|i| format!("x{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = points.iter().enumerate().map(|(k, p)| {
        let mut row = vec![k.to_string()];
        row.extend(p.iter().map(|&v| num(v)));
        row
    });
    write_rows(path, &header, rows)
}

/// A numeric CSV as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub path: PathBuf,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn read(path: &Path) -> CliResult<Self> {
        let file = std::fs::File::open(path).map_err(CliError::io(path))?;
        let mut r = ::csv::Reader::from_reader(std::io::BufReader::new(file));
        let schema = |msg: String| CliError::Schema { path: path.into(), msg };
        let headers: Vec<String> = r.headers().map_err(|e| csv_io(path, e))?.iter().map(|h| h.trim().to_string()).collect();
        if headers.is_empty() || headers.iter().any(String::is_empty) {
            return Err(schema("empty column name in header".into()));
        }
        let mut rows = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| csv_io(path, e))?;
            let row = rec
                .iter()
                .enumerate()
                .map(|(c, field)| match field.trim() {
                    "" => Ok(None),
                    s => s
                        .parse::<f64>()
                        .map(Some)
                        .map_err(|_| schema(format!("row {}, column `{}`: `{s}` is not a number", line + 1, headers[c]))),
                })
                .collect::<CliResult<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self { path: path.into(), headers, rows })
    }

    pub fn column(&self, name: &str) -> CliResult<Vec<Option<f64>>> {
        let c = self.headers.iter().position(|h| h == name).ok_or_else(|| CliError::MissingColumn {
            column: name.into(),
            available: self.headers.clone(),
        })?;
        Ok(self.rows.iter().map(|r| r[c]).collect())
    }
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_text(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    let mut f = std::fs::File::create(path).map_err(CliError::io(path))?;
    f.write_all(contents.as_bytes()).map_err(CliError::io(path))
}
