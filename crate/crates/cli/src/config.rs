//! Experiment configuration. Precedence: flags, then the config file, then
//! built-in defaults.
//!
//! The file is TOML with top-level run keys and one table per algorithm:
//!
//! ```toml
//! problem = "quad:cond=100"
//! algo = "cr"
//! seed = 7
//!
//! [cr]
//! M = 20.0
//! max_iters = 500
//!
//! [prox_gda]
//! eta_x = 0.01
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const DEFAULT_OUT: &str = "kloptim-out";
pub const OUT_ENV: &str = "KLOPTIM_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    Cr,
    ProxGda,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Cr => "cr",
            Algo::ProxGda => "prox-gda",
        })
    }
}

impl FromStr for Algo {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "cr" => Ok(Algo::Cr),
            "prox-gda" | "prox_gda" | "gda" => Ok(Algo::ProxGda),
            _ => Err(CliError::InvalidParams(format!("unknown algorithm `{s}` (cr, prox-gda)"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrParams {
    #[serde(rename = "M")]
    pub m: Option<f64>,
    pub max_iters: Option<usize>,
    pub grad_tol: Option<f64>,
    pub neg_eig_tol: Option<f64>,
    pub subsolver_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GdaParams {
    pub eta_x: Option<f64>,
    pub eta_y: Option<f64>,
    pub max_iters: Option<usize>,
    pub step_tol: Option<f64>,
}

/// Everything a run needs. Algorithm parameters stay optional here and are
/// resolved against the oracle's constants at run time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub problem: String,
    pub algo: Algo,
    pub seed: u64,
    pub out: PathBuf,
    pub store_points: bool,
    pub strict: bool,
    pub cr: CrParams,
    pub prox_gda: GdaParams,
}

impl ExperimentConfig {
    pub fn new(problem: impl Into<String>, algo: Algo, out: impl Into<PathBuf>) -> Self {
        Self {
            problem: problem.into(),
            algo,
            seed: 0,
            out: out.into(),
            store_points: false,
            strict: false,
            cr: CrParams::default(),
            prox_gda: GdaParams::default(),
        }
    }
}

/// Contents of a `--config` file; every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub problem: Option<String>,
    pub algo: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub store_points: Option<bool>,
    pub strict: Option<bool>,
    #[serde(default)]
    pub cr: CrParams,
    #[serde(default)]
    pub prox_gda: GdaParams,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        Self::parse(&text).map_err(|msg| CliError::InvalidParams(format!("{}: {msg}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

/// Values given on the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub problem: Option<String>,
    pub algo: Option<String>,
    pub m: Option<f64>,
    pub eta_x: Option<f64>,
    pub eta_y: Option<f64>,
    pub max_iters: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub store_points: bool,
    pub strict: bool,
}

/// Run directory used when none is given: `<root>/<problem>-<algo>-s<seed>`
/// with punctuation in the problem id replaced by `_`.
pub fn default_run_dir(root: &Path, problem: &str, algo: Algo, seed: u64) -> PathBuf {
    let slug: String = problem.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' }).collect();
    root.join(format!("{slug}-{algo}-s{seed}"))
}

/// `env_root` is the value of `KLOPTIM_OUT`, if set.
pub fn resolve(flags: Overrides, file: FileConfig, env_root: Option<PathBuf>) -> CliResult<ExperimentConfig> {
    let problem = flags
        .problem
        .or(file.problem)
        .ok_or_else(|| CliError::InvalidParams("no problem given (--problem or `problem =` in the config file)".into()))?;
    let algo: Algo = match flags.algo.or(file.algo) {
        Some(a) => a.parse()?,
        None => Algo::Cr,
    };
    let mut cr = file.cr;
    let mut gda = file.prox_gda;
    cr.m = flags.m.or(cr.m);
    gda.eta_x = flags.eta_x.or(gda.eta_x);
    gda.eta_y = flags.eta_y.or(gda.eta_y);
    if flags.max_iters.is_some() {
        match algo {
            Algo::Cr => cr.max_iters = flags.max_iters,
            Algo::ProxGda => gda.max_iters = flags.max_iters,
        }
    }
    for (name, v) in [("M", cr.m), ("eta_x", gda.eta_x), ("eta_y", gda.eta_y)] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::InvalidParams(format!("{name} must be positive and finite, got {v}")));
            }
        }
    }
    let seed = flags.seed.or(file.seed).unwrap_or(0);
    let out = flags.out.or(file.out).unwrap_or_else(|| {
        default_run_dir(&env_root.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)), &problem, algo, seed)
    });
    Ok(ExperimentConfig {
        problem,
        algo,
        seed,
        out,
        store_points: flags.store_points || file.store_points.unwrap_or(false),
        strict: flags.strict || file.strict.unwrap_or(false),
        cr,
        prox_gda: gda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FILE: &str = r#"
problem = "quad:cond=10"
seed = 3

[cr]
M = 20.0
max_iters = 50

[prox_gda]
eta_y = 0.5
"#;

    #[test]
    fn flags_override_file_override_defaults() {
        let file = FileConfig::parse(FILE).unwrap();
        let cfg = resolve(Overrides { m: Some(5.0), ..Default::default() }, file.clone(), None).unwrap();
        assert_eq!(cfg.problem, "quad:cond=10");
        assert_eq!(cfg.algo, Algo::Cr);
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.cr.m, Some(5.0));
        assert_eq!(cfg.cr.max_iters, Some(50));
        assert_eq!(cfg.prox_gda.eta_y, Some(0.5));
        assert_eq!(cfg.out, PathBuf::from("kloptim-out/quad_cond_10-cr-s3"));

        let cfg = resolve(
            Overrides { max_iters: Some(7), algo: Some("prox-gda".into()), ..Default::default() },
            file,
            Some("/tmp/env".into()),
        )
        .unwrap();
        assert_eq!(cfg.cr.max_iters, Some(50));
        assert_eq!(cfg.prox_gda.max_iters, Some(7));
        assert_eq!(cfg.out, PathBuf::from("/tmp/env/quad_cond_10-prox-gda-s3"));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(FileConfig::parse("[cr]\nmm = 1.0\n").is_err());
        assert!(FileConfig::parse("colour = 1\n").is_err());
        let bad = Overrides { problem: Some("quad:cond=1".into()), eta_x: Some(-1.0), ..Default::default() };
        assert!(matches!(resolve(bad, FileConfig::default(), None), Err(CliError::InvalidParams(_))));
        assert!(resolve(Overrides::default(), FileConfig::default(), None).is_err());
        assert!("sgd".parse::<Algo>().is_err());
    }
}
