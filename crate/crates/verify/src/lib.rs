//! Scenario-driven verification of frame-change identities.
//!
//! A scenario (TOML) names an observer motion, a set of registry fields, a
//! sampling plan and a list of checks. [`run_scenario`] validates it, runs
//! every check over the sample points, and writes a JSON report and a CSV of
//! per-sample comparisons.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod error;
pub mod expm;
pub mod report;
pub mod scenario;

use std::path::Path;
use std::thread;

use checks::{CheckResult, PreparedCheck, SampleRow, Status};
pub use error::{ConfigError, OutputError};
use objectivity_core::{Motion, SpacetimePoint};
pub use report::Report;
pub use scenario::{Prepared, RunOptions, Scenario};

/// Process exit code when every check passes.
pub const EXIT_PASS: i32 = 0;
/// Process exit code when some check fails or an output cannot be written.
pub const EXIT_FAIL: i32 = 1;
/// Process exit code for usage and configuration errors.
pub const EXIT_CONFIG: i32 = 2;

/// Everything produced by one scenario run.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub rows: Vec<SampleRow>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.report.passed
    }
}

/// Runs the checks concurrently; results and rows keep the scenario order.
pub fn run_checks(
    m: &Motion,
    samples: &[SpacetimePoint],
    checks: &[PreparedCheck],
) -> Vec<(CheckResult, Vec<SampleRow>)> {
    thread::scope(|s| {
        let handles: Vec<_> = checks.iter().map(|c| s.spawn(move || c.run(m, samples))).collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    })
}

pub fn run_prepared(p: &Prepared) -> Outcome {
    let mut results = Vec::with_capacity(p.checks.len());
    let mut rows = Vec::new();
    for (r, mut csv) in run_checks(&p.motion, &p.samples, &p.checks) {
        results.push(r);
        rows.append(&mut csv);
    }
    let report = Report::new(p.name.clone(), p.seed, p.motion_spec.clone(), p.samples.len(), results);
    Outcome { report, rows }
}

/// Loads and validates a scenario file; relative output paths resolve
/// against the file's directory.
pub fn prepare(path: &Path, opts: &RunOptions) -> Result<Prepared, ConfigError> {
    let scenario = scenario::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    scenario.prepare(opts, base)
}

/// Runs a prepared scenario and writes its outputs.
pub fn execute(p: &Prepared) -> Result<Outcome, OutputError> {
    let outcome = run_prepared(p);
    if let Some(path) = &p.report {
        outcome.report.write_json(path)?;
    }
    if let Some(path) = &p.csv {
        report::write_csv(path, &outcome.rows)?;
    }
    Ok(outcome)
}

/// Re-evaluates a check at a single point and returns its defect there.
pub fn reevaluate(check: &PreparedCheck, m: &Motion, p: SpacetimePoint) -> objectivity_core::Result<f64> {
    Ok(checks::max_err(&check.kind.evaluate(m, p)?))
}

/// One-line human summary of a check result.
pub fn summary_line(r: &CheckResult) -> String {
    let status = match r.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
    };
    let bound = match r.expect {
        checks::Expectation::Holds => format!("<= {:e}", r.threshold),
        checks::Expectation::Violated => format!(">= {:e}", r.threshold),
    };
    let mut line = format!(
        "{status} {:<28} {:<24} max_abs_err={:.3e} ({bound}) samples={} [{:.1} ms]",
        r.id,
        r.check_type.name(),
        r.max_abs_err,
        r.sample_count,
        r.elapsed.as_secs_f64() * 1e3
    );
    if let Some(e) = &r.error {
        line.push_str(&format!(" error: {e}"));
    }
    line
}

/// Full CLI flow for `verify`: prints a summary to stdout and diagnostics to
/// stderr, and returns the process exit code.
pub fn run_scenario(path: &Path, opts: &RunOptions) -> i32 {
    let prepared = match prepare(path, opts) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return EXIT_CONFIG;
        }
    };
    let outcome = match execute(&prepared) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAIL;
        }
    };
    println!("scenario {} (seed {}, {} samples)", prepared.name, prepared.seed, prepared.samples.len());
    for r in &outcome.report.checks {
        println!("{}", summary_line(r));
    }
    let failed = outcome.report.checks.iter().filter(|c| c.status == Status::Fail).count();
    if failed == 0 {
        println!("all {} checks passed", outcome.report.checks.len());
        EXIT_PASS
    } else {
        println!("{failed} of {} checks failed", outcome.report.checks.len());
        EXIT_FAIL
    }
}
