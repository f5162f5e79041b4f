//! The `algestim` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

use super::config::{ExperimentConfig, ExperimentKind};
use super::{error_exit_code, run_with_jobs, EXIT_CONFIG, EXIT_PASS};
use crate::error::{Error, Result};

/// Environment variable consulted when neither `--seed` nor the config sets one.
pub const SEED_ENV: &str = "ALGESTIM_SEED";

#[derive(Debug, Parser)]
#[command(name = "algestim", version, about = "Run a noise or estimator experiment and write CSV reports")]
pub struct Cli {
    /// osc-trend, mult-reduce, window-sweep, centlim or burst-demod
    pub experiment: String,
    /// JSON experiment config
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory [default: config `output`, else out/<experiment>]
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [default: all cores]
    #[arg(long)]
    pub jobs: Option<usize>,
}

/// Parses `args`, runs the experiment and returns the process exit code.
/// `env_seed` is the raw value of [`SEED_ENV`], if set.
pub fn main_with(
    args: impl IntoIterator<Item = impl Into<OsString> + Clone>,
    env_seed: Option<String>,
    out: &mut impl Write,
    err: &mut impl Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{e}");
            return EXIT_CONFIG;
        }
        Err(e) => {
            let _ = write!(out, "{e}");
            return EXIT_PASS;
        }
    };
    match execute(&cli, env_seed, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "algestim: {e}");
            error_exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, env_seed: Option<String>, out: &mut impl Write) -> Result<i32> {
    let kind: ExperimentKind = cli.experiment.parse()?;
    let env_seed = env_seed
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("{SEED_ENV}={s:?} is not a u64")))
        })
        .transpose()?;
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", cli.config.display())))?;
    let resolved = ExperimentConfig::from_json(&text)?.resolve(kind, cli.seed, env_seed)?;
    if cli.jobs == Some(0) {
        return Err(Error::Config("--jobs must be >= 1".into()));
    }
    let jobs = cli.jobs.unwrap_or_else(rayon::current_num_threads);

    let report = run_with_jobs(&resolved, jobs)?;
    let dir = cli
        .out
        .clone()
        .or_else(|| resolved.output.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(kind.name()));
    report.write_to(&dir)?;

    let emit = |out: &mut dyn Write| -> std::io::Result<()> {
        for c in &report.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            writeln!(out, "{verdict} {} value={} threshold={}", c.name, c.value, c.threshold)?;
        }
        writeln!(out, "{kind}: wrote {} files to {}", report.files.len(), dir.display())
    };
    emit(out)?;
    Ok(report.exit_code())
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let env_seed = std::env::var(SEED_ENV).ok();
    main_with(std::env::args_os(), env_seed, &mut std::io::stdout(), &mut std::io::stderr())
}
