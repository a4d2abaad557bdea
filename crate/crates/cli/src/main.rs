#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::config::{ConfigError, RunConfig};
use crate::output::Output;

const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(
    name = "helixwarp",
    version,
    about = "Trajectory geometry diagnostics for swirling axisymmetric flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `outputs` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for batch fan-out.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Scan for times where the flux window condition holds.
    FluxWindow(RunArgs),
    /// Integrate particle trajectories for every seed.
    Trace(RunArgs),
    /// Frenet frames along arc-length resampled trajectories.
    Geometry(RunArgs),
    /// Streamline-map smoothness report over a list of times.
    Profile(RunArgs),
    /// Pressure-curvature identities and the rotation-invariance residual.
    Identities(RunArgs),
}

fn run(cli: Cli) -> Result<u8> {
    let (args, name) = match &cli.command {
        Command::FluxWindow(a) => (a, "flux-window"),
        Command::Trace(a) => (a, "trace"),
        Command::Geometry(a) => (a, "geometry"),
        Command::Profile(a) => (a, "profile"),
        Command::Identities(a) => (a, "identities"),
    };
    let cfg = RunConfig::load(&args.config)?;
    let field = cfg.build_field()?;
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(ConfigError("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring thread pool")?;
    }
    let dir = args
        .out
        .clone()
        .or_else(|| cfg.outputs.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let out = Output::create(&dir, &cfg)?;
    eprintln!("{name}: config {} -> {}", &out.hash()[..12], dir.display());
    match cli.command {
        Command::FluxWindow(_) => commands::flux_window(&cfg, &out),
        Command::Trace(_) => commands::trace(&cfg, &field, &out),
        Command::Geometry(_) => commands::geometry(&cfg, &field, &out),
        Command::Profile(_) => commands::profile(&cfg, &field, &out),
        Command::Identities(_) => commands::identities(&cfg, &field, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let config_error = e.downcast_ref::<ConfigError>().is_some()
                || matches!(
                    e.downcast_ref::<helixwarp_core::Error>(),
                    Some(helixwarp_core::Error::Config(_))
                );
            ExitCode::from(if config_error {
                EXIT_CONFIG
            } else {
                commands::EXIT_FAILURE
            })
        }
    }
}
