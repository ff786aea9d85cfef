//! Command-line front end.
//!
//! Exit status is 0 on success, 1 for usage and validation errors (including
//! missing files) and 2 for failures while running. Diagnostics go to the
//! error stream; data goes to files or the output stream.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::sim::{fixtures, monte_carlo, sweep, sweep_csv, ConfigError, Report, Scenario, ScenarioConfig, SweepAxis};
use crate::space::pattern_space_size;

/// Environment variable overriding the scenario seed.
pub const SEED_ENV: &str = "BEACONVEIL_SEED";

#[derive(Debug, Parser)]
#[command(name = "beaconveil", version, about = "Covert physical-layer UAV authentication: scenarios, sweeps and reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct RunFlags {
    /// Base seed; beats BEACONVEIL_SEED, which beats the file.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of Monte Carlo trials.
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a scenario file without running it.
    Validate { config: PathBuf },
    /// Run a scenario; writes report.json and trials.csv to --out, or the JSON report to stdout.
    Run {
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Run a scenario once per value of one parameter.
    Sweep {
        config: PathBuf,
        /// distance, sigma_db, n, L or eps_tu.
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<f64>,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Print the size of the pattern space.
    Enumerate {
        #[arg(long)]
        n: u32,
        #[arg(long = "L")]
        l: u32,
        #[arg(long)]
        channels: u32,
        #[arg(long = "max-tu")]
        max_tu: u32,
    },
    /// Write the built-in scenario files.
    Fixtures {
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

enum Failure {
    Invalid(String),
    Runtime(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

/// Runs the command line `args` (program name first). `seed_env` is the
/// value of [`SEED_ENV`], if set.
pub fn run<I, T>(args: I, seed_env: Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command, seed_env, out) {
        Ok(()) => 0,
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn load(path: &Path, flags: Option<&RunFlags>, seed_env: Option<String>) -> Result<Scenario, Failure> {
    let mut cfg = ScenarioConfig::load(path)?;
    if let Some(text) = seed_env {
        cfg.run.seed = text
            .trim()
            .parse()
            .map_err(|_| Failure::Invalid(format!("{SEED_ENV}={text:?} is not an unsigned integer")))?;
    }
    if let Some(flags) = flags {
        if let Some(seed) = flags.seed {
            cfg.run.seed = seed;
        }
        if let Some(trials) = flags.trials {
            cfg.run.trials = trials;
        }
        if flags.threads == Some(0) {
            return Err(Failure::Invalid("--threads must be at least 1".into()));
        }
    }
    Scenario::new(cfg).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn execute(command: Command, seed_env: Option<String>, out: &mut dyn Write) -> Result<(), Failure> {
    let stdout_failure = |e: std::io::Error| Failure::Runtime(format!("stdout: {e}"));
    match command {
        Command::Validate { config } => {
            let s = load(&config, None, seed_env)?;
            writeln!(
                out,
                "{}: ok ({} stored pattern(s), actor {}, {} trial(s), seed {})",
                config.display(),
                s.store.len(),
                s.config.actor.name(),
                s.config.run.trials,
                s.config.run.seed
            )
            .map_err(stdout_failure)?;
        }
        Command::Run { config, flags } => {
            let s = load(&config, Some(&flags), seed_env)?;
            let run = monte_carlo(&s, flags.threads).map_err(|e| Failure::Runtime(e.to_string()))?;
            let report = Report::new(&run);
            match &flags.out {
                Some(dir) => {
                    report.write_to(dir).map_err(|e| io_failure(dir, e))?;
                    let m = &run.metrics;
                    writeln!(
                        out,
                        "trials {} far {:.6} [{:.6}, {:.6}] frr {:.6} [{:.6}, {:.6}] mean_session_s {:.3}",
                        m.trials, m.far, m.far_ci95.0, m.far_ci95.1, m.frr, m.frr_ci95.0, m.frr_ci95.1, m.mean_session_s
                    )
                    .map_err(stdout_failure)?;
                    for (label, count) in &m.per_reason_counts {
                        writeln!(out, "  {label} {count}").map_err(stdout_failure)?;
                    }
                }
                None => out.write_all(report.to_json().as_bytes()).map_err(stdout_failure)?,
            }
        }
        Command::Sweep { config, axis, values, flags } => {
            let axis: SweepAxis = axis.parse().map_err(Failure::Invalid)?;
            let s = load(&config, Some(&flags), seed_env)?;
            let rows = sweep(&s.config, axis, &values, flags.threads).map_err(|e| match e {
                crate::sim::SweepError::Sim(e) => Failure::Runtime(e.to_string()),
                other => Failure::Invalid(other.to_string()),
            })?;
            let csv = sweep_csv(axis, &rows);
            match &flags.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
                    let csv_path = dir.join("sweep.csv");
                    std::fs::write(&csv_path, &csv).map_err(|e| io_failure(&csv_path, e))?;
                    let json_path = dir.join("sweep.json");
                    let mut json = serde_json::to_string_pretty(&rows).expect("rows serialise");
                    json.push('\n');
                    std::fs::write(&json_path, json).map_err(|e| io_failure(&json_path, e))?;
                    writeln!(out, "wrote {} and {}", csv_path.display(), json_path.display()).map_err(stdout_failure)?;
                }
                None => out.write_all(csv.as_bytes()).map_err(stdout_failure)?,
            }
        }
        Command::Enumerate { n, l, channels, max_tu } => {
            let size = pattern_space_size(n, l, channels, max_tu).map_err(|e| Failure::Invalid(e.to_string()))?;
            writeln!(out, "{size}").map_err(stdout_failure)?;
        }
        Command::Fixtures { out: dir } => {
            let paths = fixtures::write_fixtures(&dir).map_err(|e| io_failure(&dir, e))?;
            for p in paths {
                writeln!(out, "{}", p.display()).map_err(stdout_failure)?;
            }
        }
    }
    Ok(())
}
