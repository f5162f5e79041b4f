//! JSON-configured experiments with CSV reports.
//!
//! Each experiment reads an [`ExperimentConfig`], resolves and validates it
//! completely, runs, and returns a [`Report`]: a set of named CSV files plus
//! the pass/fail checks the experiment asserts. [`cli`] wraps this as the
//! `algestim` command.
//!
//! Exit codes: 0 when every check passes, 2 when a check fails, 3 for a
//! configuration error, 1 for anything else.

pub mod cli;
pub mod config;
mod runs;

use std::fs;
use std::path::Path;

use crate::csvfmt;
use crate::error::{Error, Result};

pub use config::{ExperimentConfig, ExperimentKind, Resolved};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_ASSERTION: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

/// File name of the resolved config written next to the CSVs.
pub const RESOLVED_CONFIG: &str = "resolved_config.json";
/// File name of the per-check summary.
pub const CHECKS_CSV: &str = "checks.csv";

/// One asserted inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value >= threshold`.
    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value >= threshold }
    }

    /// Passes when `value <= threshold`.
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value <= threshold }
    }
}

/// Everything an experiment produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub kind: ExperimentKind,
    /// `(file name, contents)` in write order.
    pub files: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_ASSERTION
        }
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    /// CSV with header `check,value,threshold,pass`.
    pub fn checks_csv(&self) -> String {
        let mut table = csvfmt::Table::new(&["check", "value", "threshold", "pass"]);
        for c in &self.checks {
            table.row(&[
                c.name.clone(),
                csvfmt::real(c.value),
                csvfmt::real(c.threshold),
                c.pass.to_string(),
            ]);
        }
        table.into_string()
    }

    /// Writes every file into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (name, contents) in &self.files {
            fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }
}

/// Exit code for an error that stopped an experiment.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::Argument(_)
        | Error::Construction(_)
        | Error::DivisorZero { .. }
        | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_INTERNAL,
    }
}

/// Runs a resolved experiment on the current rayon pool.
pub fn run(resolved: &Resolved) -> Result<Report> {
    let (data, mut extras) = match resolved.kind {
        ExperimentKind::OscTrend => runs::osc_trend(resolved)?,
        ExperimentKind::MultReduce => runs::mult_reduce(resolved)?,
        ExperimentKind::WindowSweep => runs::window_sweep(resolved)?,
        ExperimentKind::Centlim => runs::centlim(resolved)?,
        ExperimentKind::BurstDemod => runs::burst_demod(resolved)?,
    };
    let mut files = vec![(format!("{}.csv", resolved.kind.name().replace('-', "_")), data)];
    files.append(&mut extras.files);
    let mut report = Report { kind: resolved.kind, files, checks: extras.checks };
    let summary = report.checks_csv();
    report.files.push((CHECKS_CSV.to_string(), summary));
    report.files.push((RESOLVED_CONFIG.to_string(), resolved.to_json()));
    Ok(report)
}

/// Runs on a dedicated pool of `jobs` worker threads. Results do not depend
/// on `jobs`.
pub fn run_with_jobs(resolved: &Resolved, jobs: usize) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| run(resolved))
}

/// Secondary outputs of a runner.
#[derive(Debug, Default)]
struct Extras {
    files: Vec<(String, String)>,
    checks: Vec<Check>,
}

/// Median of the finite entries; NaN when there are none.
pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_skips_non_finite() {
        assert_eq!(median(&[3.0, f64::NAN, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[f64::NAN]).is_nan());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(error_exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        let io = Error::Io(std::io::Error::other("x"));
        assert_eq!(error_exit_code(&io), EXIT_INTERNAL);
        let failing = Report {
            kind: ExperimentKind::Centlim,
            files: vec![],
            checks: vec![Check::at_least("a", 1.0, 2.0)],
        };
        assert_eq!(failing.exit_code(), EXIT_ASSERTION);
        assert!(!Check::at_most("b", f64::NAN, 1.0).pass);
    }
}
