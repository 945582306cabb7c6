use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kloptim_cli::config::{resolve, FileConfig, Overrides, DEFAULT_OUT, OUT_ENV};
use kloptim_cli::fit::format_report;
use kloptim_cli::problems::CATALOG;
use kloptim_cli::suite::{format_table, SuiteOptions};
use kloptim_cli::{cmd_fit, cmd_run, cmd_suite, CliError, CliResult};

// stdout may be a closed pipe (`kloptim fit ... | head`); drop the output quietly
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! say_raw {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "kloptim", version, about = "Cubic-regularized Newton and proximal GDA experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write trace.csv and summary.json.
    Run(RunArgs),
    /// Run the acceptance matrix and print one row per criterion.
    Suite(SuiteArgs),
    /// Classify the convergence rate of one column of a trace CSV.
    Fit(FitArgs),
    /// List the problem zoo.
    List,
}

#[derive(Args)]
struct RunArgs {
    /// Zoo id, e.g. `quad:cond=100` (see `list`).
    #[arg(long)]
    problem: Option<String>,
    /// `cr` or `prox-gda`.
    #[arg(long)]
    algo: Option<String>,
    /// Cubic regularization constant (default 2·L₂).
    #[arg(long = "M")]
    m: Option<f64>,
    #[arg(long)]
    eta_x: Option<f64>,
    #[arg(long)]
    eta_y: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Seeds problem generation only; the solvers are deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Run directory (default `$KLOPTIM_OUT/<problem>-<algo>-s<seed>`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    store_points: bool,
    /// Exit nonzero when a monitor fails.
    #[arg(long)]
    strict: bool,
    /// TOML file with run keys and `[cr]` / `[prox_gda]` tables.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Worker threads (default: one per core).
    #[arg(long)]
    jobs: Option<usize>,
    /// Only criteria whose name contains this (or whose number equals it).
    #[arg(long)]
    filter: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, hide = true)]
    inject_subsolver_fault: bool,
}

#[derive(Args)]
struct FitArgs {
    trace_csv: PathBuf,
    #[arg(long)]
    column: String,
    /// Leading entries to skip (default max(10, n/5)).
    #[arg(long)]
    burn_in: Option<usize>,
}

fn out_root() -> Option<PathBuf> {
    std::env::var_os(OUT_ENV).map(PathBuf::from)
}

fn run(args: RunArgs) -> CliResult<()> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let flags = Overrides {
        problem: args.problem,
        algo: args.algo,
        m: args.m,
        eta_x: args.eta_x,
        eta_y: args.eta_y,
        max_iters: args.max_iters,
        seed: args.seed,
        out: args.out,
        store_points: args.store_points,
        strict: args.strict,
    };
    let config = resolve(flags, file, out_root())?;
    let bundle = cmd_run(&config)?;
    let s = &bundle.summary;
    say!("{} ({}): {} iterations, {}", s.problem_name, config.algo, s.iterations, s.terminated_by);
    say!("final value {:.6e}, wall time {:.3}s", s.final_value, s.wall_time_secs);
    for f in &s.hard_failures {
        eprintln!("warning: {f}");
    }
    say!("trace   {}", bundle.trace_path.display());
    say!("summary {}", bundle.summary_path.display());
    Ok(())
}

fn suite(args: SuiteArgs) -> CliResult<bool> {
    let out = args.out.or_else(out_root).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)).join("suite");
    let opts = SuiteOptions { jobs: args.jobs, filter: args.filter, out: out.clone(), inject_subsolver_fault: args.inject_subsolver_fault };
    let rows = cmd_suite(&opts)?;
    if rows.is_empty() {
        eprintln!("warning: no criteria match the filter");
        return Ok(true);
    }
    say_raw!("{}", format_table(&rows));
    let json = serde_json::to_string_pretty(&rows).map_err(|e| CliError::InvalidParams(e.to_string()))?;
    kloptim_cli::csv::write_text(&out.join("suite.json"), &(json + "\n"))?;
    let failed = rows.iter().filter(|r| !r.pass()).count();
    say!("{} passed, {failed} failed", rows.len() - failed);
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Run(a) => run(a).map(|_| true),
        Command::Suite(a) => suite(a),
        Command::Fit(a) => cmd_fit(&a.trace_csv, &a.column, a.burn_in).map(|out| {
            say_raw!("{}", format_report(&out.report));
            say!("plot script {}", out.plot_script.display());
            true
        }),
        Command::List => {
            for (id, what) in CATALOG {
                say!("{id:<28} {what}");
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
