use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use epf::cli::{cmd_filter, cmd_gibbs_sweep, cmd_selftest, cmd_simulate};
use epf::config::ExperimentConfig;
use epf::selftest::Fault;

/// Extended parameter filter experiments.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (flat key = value file).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the config output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a trajectory and write trajectory.csv.
    Simulate,
    /// Run the configured filter over a trajectory.
    Filter {
        /// Trajectory CSV; simulated from the config when omitted.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Grid Gibbs densities, shrinkage and KL sweep.
    GibbsSweep {
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Oracle-equivalence checks.
    Selftest {
        #[arg(long, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    KfCoefficient,
}

fn config(cli: &Cli, trajectory: Option<&PathBuf>) -> epf::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    if let Some(t) = trajectory {
        cfg.trajectory = Some(t.clone());
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> epf::Result<bool> {
    let mut out = std::io::stdout().lock();
    match &cli.command {
        Command::Simulate => cmd_simulate(&config(cli, None)?, &mut out).map(|_| true),
        Command::Filter { trajectory } => cmd_filter(&config(cli, trajectory.as_ref())?, &mut out).map(|_| true),
        Command::GibbsSweep { trajectory } => cmd_gibbs_sweep(&config(cli, trajectory.as_ref())?, &mut out).map(|_| true),
        Command::Selftest { inject_fault } => {
            let fault = inject_fault.map(|FaultArg::KfCoefficient| Fault::KalmanCoefficient);
            cmd_selftest(fault, &mut out)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
