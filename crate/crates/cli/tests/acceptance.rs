//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;

use kloptim_cli::suite::{cmd_suite, SuiteOptions};

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let opts = SuiteOptions { out: dir.path().to_path_buf(), ..Default::default() };
    let rows = cmd_suite(&opts).expect("suite runs");
    assert_eq!(rows.len(), 14);
    let mut failed = 0;
    for r in &rows {
        let verdict = if r.pass() { "pass" } else { "FAIL" };
        let detail = match (&r.outcome, &r.error) {
            (Some(o), _) => format!("{} (expected {}; tol {})", o.observed, o.expected, o.tolerance),
            (None, e) => format!("error: {}", e.as_deref().unwrap_or("?")),
        };
        println!("criterion {:>2} {:<28} {verdict}: {detail}", r.id, r.name);
        failed += usize::from(!r.pass());
    }
    println!("acceptance: {} passed, {failed} failed", rows.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
