//! Command-line runner for decoding-interface experiments.
//!
//! Exit codes: 0 on success, 1 when an invariant fails or a run errors,
//! 2 on usage errors (bad flags, unreadable or invalid configs).

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use config::{AuditConfig, Common, E2eCliConfig, FamilySource, SweepConfig, TreeConfig, ValidateConfig};
use output::RunOutput;

#[derive(Parser)]
#[command(name = "ftinterface", version, about = "Decoding-interface experiments on CSS code families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Flags {
    /// JSON config; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; overrides the config value.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a code family and compute distances.
    ValidateCodes(Flags),
    /// Monte Carlo failure rate of one interface over a noise grid.
    InterfaceSweep(Flags),
    /// Qubit census of interface schedules against the overhead bounds.
    ScheduleAudit(Flags),
    /// Exact inclusion probabilities on the failure tree against their bounds.
    TreeBounds(Flags),
    /// End-to-end run of a scheduled interface.
    E2e(Flags),
}

#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(e: anyhow::Error) -> anyhow::Error {
    UsageError(format!("{e:#}")).into()
}

/// Loads and checks a config, applies flag overrides and sets up the pool.
fn prepare<T>(flags: &Flags) -> Result<(T, usize)>
where
    T: DeserializeOwned + Default + Serialize + Common,
{
    let mut cfg: T = config::load(flags.config.as_deref()).map_err(usage)?;
    if let Some(seed) = flags.seed {
        *cfg.seed_mut() = seed;
    }
    cfg.check().map_err(usage)?;
    let workers = flags.workers.or(cfg.workers()).unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(usage(anyhow::anyhow!("workers must be at least 1")));
    }
    // A second build in the same process is harmless; the first pool wins.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    Ok((cfg, workers))
}

fn family(name: &str, flags: &Flags) -> Result<FamilySource> {
    FamilySource::resolve(name, flags.config.as_deref()).map_err(usage)
}

fn run_with<T, F>(name: &'static str, flags: &Flags, body: F) -> Result<bool>
where
    T: DeserializeOwned + Default + Serialize + Common,
    F: FnOnce(&T, &mut RunOutput) -> Result<bool>,
{
    let (cfg, workers) = prepare::<T>(flags)?;
    let mut out = RunOutput::new(&flags.out, name, &cfg, workers)?;
    let passed = body(&cfg, &mut out)?;
    out.finish(passed).context("writing manifest")?;
    Ok(passed)
}

fn run(cli: Cli) -> Result<bool> {
    match &cli.command {
        Command::ValidateCodes(f) => run_with("validate-codes", f, |c: &ValidateConfig, out| {
            commands::validate_codes(&family(&c.family, f)?, out)
        }),
        Command::InterfaceSweep(f) => run_with("interface-sweep", f, |c: &SweepConfig, out| {
            commands::interface_sweep(c, &family(&c.family, f)?, out)
        }),
        Command::ScheduleAudit(f) => run_with("schedule-audit", f, |c: &AuditConfig, out| {
            commands::schedule_audit(c, &family(&c.family, f)?, out)
        }),
        Command::TreeBounds(f) => run_with("tree-bounds", f, |c: &TreeConfig, out| commands::tree_bounds(c, out)),
        Command::E2e(f) => run_with("e2e", f, |c: &E2eCliConfig, out| commands::e2e(c, &family(&c.family, f)?, out)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: invariant check failed");
            ExitCode::from(1)
        }
        Err(e) if e.is::<UsageError>() => {
            eprintln!("usage error: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

