//! `edgeflow` command-line front end.
//!
//! Exit codes: 0 success, 1 failed verification or computation, 2 usage or
//! configuration error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use commands::Failure;

#[derive(Parser)]
#[command(name = "edgeflow", version, about = "Edge spectra and spectral flow of soft-wall tight-binding models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config's `output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Bloch bands and gap catalog.
    Bands,
    /// Classified edge spectra over a t grid.
    EdgeSweep,
    /// Spectral flow across each probe energy.
    Flow,
    /// Consolidated PASS/FAIL checks; runs a built-in suite without --config.
    Verify,
    /// Eigenvalue counts on dislocated rings.
    Ring,
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(anyhow::anyhow!("--threads: {e}")))?;
    }
    let cfg = match &cli.config {
        Some(path) => Some(config::load(path).map_err(Failure::Usage)?),
        None => None,
    };
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.as_ref().and_then(|c| c.output.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    let needs = |cfg: Option<config::RunConfig>| cfg.ok_or_else(|| Failure::Usage(anyhow::anyhow!("--config is required")));
    match cli.command {
        Command::Bands => commands::bands(&needs(cfg)?, &out),
        Command::EdgeSweep => commands::edge_sweep(&needs(cfg)?, &out),
        Command::Flow => commands::flow(&needs(cfg)?, &out),
        Command::Ring => commands::ring(&needs(cfg)?, &out),
        Command::Verify => {
            let cfgs = match cfg {
                Some(c) => vec![c],
                None => commands::default_suite(),
            };
            commands::verify(&cfgs, &out, cli.seed)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("usage error: {e:#}");
            ExitCode::from(2)
        }
    }
}
