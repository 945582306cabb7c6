//! Zoo grammar: `family:key=value,...`, seeded through ChaCha8.
//!
//! ```text
//! power{2,3,4,6}:d=N[,scale=S]
//! quad:cond=C[,d=N]
//! saddle:2d | saddle:d=N[,gamma=G]
//! bilinear:1d[,mu=M][,g=G] | bilinear:d=N[,mu=M][,g=G]
//!   G = zero | l1:w | sql2:w | ball:r | box:r
//! ```

use std::collections::BTreeMap;

use kloptim::linalg::sym_eig;
use kloptim::zoo::{Bilinear, PowerNorm, Quadratic, SaddleConfined};
use kloptim::{Matrix64, MinimaxOracle, Point64, ProxOperator64, SmoothOracle, SymMatrix64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, CliError, CliResult};

pub const MAX_DIM: usize = 200;
/// Dual ball radius for the bilinear family; generous enough that `y*(x)`
/// stays interior along every run from a unit start.
const Y_RADIUS: f64 = 10.0;
const SADDLE_START_NORM: f64 = 0.1;
/// Curvature added to every eigenvalue of `Φ` in `bilinear:d=N`.
const BILINEAR_PHI_FLOOR: f64 = 0.3;

pub const CATALOG: &[(&str, &str)] = &[
    ("power{p}:d=N[,scale=S]", "c‖x‖^p, p ∈ {2,3,4,6}, θ = 1/p"),
    ("quad:cond=C[,d=N]", "½xᵀQx − bᵀx, log-spaced spectrum in [1, C], d = 10 by default"),
    ("saddle:2d", "½xᵀdiag(−1,1)x + ¼‖x‖⁴, start 0.1 away from the strict saddle"),
    ("saddle:d=N[,gamma=G]", "½xᵀDx + (γ/4)‖x‖⁴, spectrum of D evenly spaced in [−1, 1]"),
    ("bilinear:1d[,mu=M][,g=G]", "xy − (μ/2)y² + g(x), start (1, 0)"),
    ("bilinear:d=N[,mu=M][,g=G]", "½xᵀDx + xᵀAy − (μ/2)‖y‖² + g(x), Φ + g strongly convex"),
];

pub enum Problem {
    Smooth { oracle: Box<dyn SmoothOracle<f64>>, x0: Point64 },
    Minimax { oracle: Box<dyn MinimaxOracle<f64>>, x0: Point64, y0: Point64 },
}

impl Problem {
    pub fn name(&self) -> String {
        match self {
            Problem::Smooth { oracle, .. } => oracle.name(),
            Problem::Minimax { oracle, .. } => oracle.name(),
        }
    }
}

struct Spec<'a> {
    id: &'a str,
    flags: Vec<&'a str>,
    kv: BTreeMap<&'a str, &'a str>,
}

impl<'a> Spec<'a> {
    fn parse(id: &'a str, params: &'a str) -> CliResult<Self> {
        let mut flags = Vec::new();
        let mut kv = BTreeMap::new();
        for tok in params.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok.split_once('=') {
                Some((k, v)) => {
                    if kv.insert(k.trim(), v.trim()).is_some() {
                        return invalid(format!("{id}: `{k}` given twice"));
                    }
                }
                None => flags.push(tok),
            }
        }
        Ok(Self { id, flags, kv })
    }

    fn allow(&self, keys: &[&str], flags: &[&str]) -> CliResult<()> {
        if let Some(k) = self.kv.keys().find(|k| !keys.contains(k)) {
            return invalid(format!("{}: unknown parameter `{k}`", self.id));
        }
        if let Some(f) = self.flags.iter().find(|f| !flags.contains(f)) {
            return invalid(format!("{}: unknown flag `{f}`", self.id));
        }
        Ok(())
    }

    fn float(&self, key: &str, default: Option<f64>) -> CliResult<f64> {
        match (self.kv.get(key), default) {
            (Some(v), _) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => invalid(format!("{}: `{key}={v}` is not a finite number", self.id)),
            },
            (None, Some(d)) => Ok(d),
            (None, None) => invalid(format!("{}: missing `{key}=`", self.id)),
        }
    }

    fn dim(&self, default: Option<usize>) -> CliResult<usize> {
        let d = match (self.kv.get("d"), default) {
            (Some(v), _) => v.parse::<usize>().or_else(|_| invalid(format!("{}: `d={v}` is not an integer", self.id)))?,
            (None, Some(d)) => d,
            (None, None) => return invalid(format!("{}: missing `d=`", self.id)),
        };
        if d == 0 || d > MAX_DIM {
            return invalid(format!("{}: d must be in 1..={MAX_DIM}", self.id));
        }
        Ok(d)
    }
}

/// `dim` sizes the box bounds.
pub fn parse_regularizer(s: &str, dim: usize) -> CliResult<ProxOperator64> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let num = || {
        arg.parse::<f64>().or_else(|_| invalid(format!("regularizer `{s}` needs a numeric argument")))
    };
    let op = match kind {
        "zero" if arg.is_empty() => ProxOperator64::Zero,
        "l1" => ProxOperator64::L1 { weight: num()? },
        "sql2" => ProxOperator64::SquaredL2 { weight: num()? },
        "ball" => ProxOperator64::Ball { radius: num()? },
        "box" => {
            let r = num()?;
            ProxOperator64::Box { lo: Point64::from_fn(dim, |_| -r), hi: Point64::from_fn(dim, |_| r) }
        }
        _ => return invalid(format!("unknown regularizer `{s}` (zero, l1:w, sql2:w, ball:r, box:r)")),
    };
    op.validate()?;
    Ok(op)
}

fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> Point64 {
    Point64::from_fn(d, |_| StandardNormal.sample(rng))
}

fn unit(rng: &mut ChaCha8Rng, d: usize) -> Point64 {
    loop {
        let v = gaussian(rng, d);
        let n = v.norm();
        if n > 1e-8 {
            return v.scaled(1.0 / n);
        }
    }
}

/// Haar-distributed orthogonal matrix: eigenvectors of a GOE sample.
fn rotation(rng: &mut ChaCha8Rng, d: usize) -> CliResult<Matrix64> {
    let mut draws = gaussian(rng, d * d).into_vec().into_iter();
    let a = SymMatrix64::from_upper(d, |_, _| draws.next().unwrap_or(0.0));
    Ok(sym_eig(&a)?.eigenvectors)
}

pub fn build(problem_id: &str, seed: u64) -> CliResult<Problem> {
    let (family, params) = problem_id.split_once(':').unwrap_or((problem_id, ""));
    let spec = Spec::parse(problem_id, params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match family {
        "power2" | "power3" | "power4" | "power6" => {
            spec.allow(&["d", "scale"], &[])?;
            let p: f64 = family[5..].parse().map_err(|_| CliError::UnknownProblem(problem_id.into()))?;
            let d = spec.dim(None)?;
            let scale = spec.float("scale", Some(1.0))?;
            let oracle = PowerNorm::new(d, p, scale)?;
            let x0 = unit(&mut rng, d);
            Ok(Problem::Smooth { oracle: Box::new(oracle), x0 })
        }
        "quad" => {
            spec.allow(&["cond", "d"], &[])?;
            let cond = spec.float("cond", None)?;
            if cond < 1.0 {
                return invalid(format!("{problem_id}: cond must be at least 1"));
            }
            let d = spec.dim(Some(10))?;
            let q = rotation(&mut rng, d)?;
            let eigs: Vec<f64> = (0..d)
                .map(|i| if d == 1 { 1.0 } else { cond.powf(i as f64 / (d - 1) as f64) })
                .collect();
            let qm = SymMatrix64::from_spectrum(&q, &eigs);
            let x_star = unit(&mut rng, d);
            let b = qm.matvec(&x_star);
            let x0 = unit(&mut rng, d);
            Ok(Problem::Smooth { oracle: Box::new(Quadratic::new(qm, b)?), x0 })
        }
        "saddle" => {
            spec.allow(&["d", "gamma"], &["2d"])?;
            let gamma = spec.float("gamma", Some(1.0))?;
            let dmat = if spec.flags.contains(&"2d") {
                if spec.kv.contains_key("d") {
                    return invalid(format!("{problem_id}: give either `2d` or `d=`"));
                }
                SymMatrix64::from_diag(&[-1.0, 1.0])
            } else {
                let d = spec.dim(None)?;
                if d < 2 {
                    return invalid(format!("{problem_id}: a strict saddle needs d ≥ 2"));
                }
                let q = rotation(&mut rng, d)?;
                let eigs: Vec<f64> = (0..d).map(|i| -1.0 + 2.0 * i as f64 / (d - 1) as f64).collect();
                SymMatrix64::from_spectrum(&q, &eigs)
            };
            let x0 = unit(&mut rng, dmat.dim()).scaled(SADDLE_START_NORM);
            let oracle = SaddleConfined::new(dmat, gamma)?.for_start(&x0);
            Ok(Problem::Smooth { oracle: Box::new(oracle), x0 })
        }
        "bilinear" => {
            spec.allow(&["d", "mu", "g"], &["1d"])?;
            let mu = spec.float("mu", Some(1.0))?;
            if mu <= 0.0 {
                return invalid(format!("{problem_id}: mu must be positive"));
            }
            let one_d = spec.flags.contains(&"1d");
            let dim = if one_d { 1 } else { spec.dim(None)? };
            let g = match spec.kv.get("g") {
                Some(s) => parse_regularizer(s, dim)?,
                None => ProxOperator64::Zero,
            };
            if one_d {
                if spec.kv.contains_key("d") {
                    return invalid(format!("{problem_id}: give either `1d` or `d=`"));
                }
                let oracle = Bilinear::new(Matrix64::identity(1), mu, None, g, Y_RADIUS)?;
                let (x0, y0) = (Point64::from(vec![1.0]), Point64::zeros(1));
                return Ok(Problem::Minimax { oracle: Box::new(oracle), x0, y0 });
            }
            let d = dim;
            // A = U diag(σ) Vᵀ and D = U diag(δ) Uᵀ with δ = −σ²/(2μ) + floor, so
            // D is indefinite for small μ while Φ'' = D + AAᵀ/μ ⪰ floor·I.
            let u = rotation(&mut rng, d)?;
            let v = rotation(&mut rng, d)?;
            let sigma: Vec<f64> = (0..d).map(|i| if d == 1 { 1.0 } else { 0.5 + 0.5 * i as f64 / (d - 1) as f64 }).collect();
            let a = Matrix64::from_fn(d, d, |i, j| (0..d).map(|k| u.get(i, k) * sigma[k] * v.get(j, k)).sum());
            let delta: Vec<f64> = sigma.iter().map(|s| -s * s / (2.0 * mu) + BILINEAR_PHI_FLOOR).collect();
            let dx = SymMatrix64::from_spectrum(&u, &delta);
            let oracle = Bilinear::new(a, mu, Some(dx), g, Y_RADIUS)?;
            let x0 = unit(&mut rng, d);
            Ok(Problem::Minimax { oracle: Box::new(oracle), x0, y0: Point64::zeros(d) })
        }
        _ => Err(CliError::UnknownProblem(problem_id.into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_entries_build() {
        for id in [
            "power2:d=3",
            "power6:d=2,scale=0.5",
            "quad:cond=100",
            "quad:cond=10,d=3",
            "saddle:2d",
            "saddle:d=4,gamma=2",
            "bilinear:1d",
            "bilinear:1d,g=l1:0.5",
            "bilinear:d=5,mu=0.5,g=box:3",
        ] {
            build(id, 1).unwrap_or_else(|e| panic!("{id}: {e}"));
        }
    }

    #[test]
    fn rejects_bad_ids() {
        assert!(matches!(build("rosenbrock:d=2", 0), Err(CliError::UnknownProblem(_))));
        assert!(matches!(build("power5:d=2", 0), Err(CliError::UnknownProblem(_))));
        for id in ["power4", "power4:d=0", "quad:cond=0.5", "quad:cond=abc", "saddle:d=1", "bilinear:1d,g=huber:1", "power4:d=2,q=1"] {
            assert!(matches!(build(id, 0), Err(CliError::InvalidParams(_)) | Err(CliError::Solver(_))), "{id}");
        }
    }

    #[test]
    fn seeds_change_starts_not_structure() {
        let norms = |seed| match build("quad:cond=10,d=4", seed).unwrap() {
            Problem::Smooth { oracle, x0 } => (x0, oracle.constants().lipschitz_grad),
            _ => unreachable!(),
        };
        let (a, la) = norms(1);
        let (b, lb) = norms(2);
        assert!((a.norm() - 1.0).abs() < 1e-12 && (b.norm() - 1.0).abs() < 1e-12);
        assert!(a.dist(&b) > 1e-6);
        assert!((la - 10.0).abs() < 1e-9 && (lb - 10.0).abs() < 1e-9);
        assert_eq!(norms(1).0, a);
    }

    #[test]
    fn bilinear_phi_is_strongly_convex() {
        let Problem::Minimax { oracle, .. } = build("bilinear:d=6,mu=0.5", 3).unwrap() else { unreachable!() };
        assert_eq!(oracle.kl_theta(), Some(0.5));
        assert_eq!(oracle.minimizer().unwrap().norm(), 0.0);
    }
}
