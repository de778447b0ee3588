//! `klift`: run direct-encoding experiments from a TOML configuration.
//!
//! ```text
//! klift encode --config configs/identity.toml --out out/identity
//! klift sweep  --config configs/sweep.toml --set analysis.sweep_sizes=[17,33]
//! ```

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use commands::{Run, RunOutput};
use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "klift", version, about = "Direct-encoding lifted models for discontinuous maps")]
struct Cli {
    /// Worker threads for quadrature assembly (default: all cores).
    #[arg(long, global = true, env = "KLIFT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble R and Q, solve for A and write all three with a conditioning report.
    Encode(RunArgs),
    /// Compare a lifted prediction with the true trajectory.
    Predict(RunArgs),
    /// Eigenvalues of A and a stability classification.
    Spectrum(RunArgs),
    /// Prediction RMSE over a ladder of Fourier dictionary sizes.
    Sweep(RunArgs),
    /// Truncated-kernel reproduction of x, x^2, x^3 and cos 2 pi x.
    KernelCheck(RunArgs),
    /// Projection residuals J_N and reconstruction errors I_N.
    Residuals(RunArgs),
    /// Sample trajectories and k-means++ RBF centers.
    Centers(RunArgs),
    /// Print the resolved configuration without running anything.
    ShowConfig(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration file.
    #[arg(long, short)]
    config: PathBuf,
    /// Output directory (overrides `output_dir`).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Master seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Override a configuration key, e.g. `--set dictionary.n_max=64`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Encode(_) => "encode",
            Command::Predict(_) => "predict",
            Command::Spectrum(_) => "spectrum",
            Command::Sweep(_) => "sweep",
            Command::KernelCheck(_) => "kernel-check",
            Command::Residuals(_) => "residuals",
            Command::Centers(_) => "centers",
            Command::ShowConfig(_) => "show-config",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Encode(a)
            | Command::Predict(a)
            | Command::Spectrum(a)
            | Command::Sweep(a)
            | Command::KernelCheck(a)
            | Command::Residuals(a)
            | Command::Centers(a)
            | Command::ShowConfig(a) => a,
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool (--threads / KLIFT_THREADS)")?;
    }

    let args = cli.command.args();
    let mut overrides = args.overrides.clone();
    if let Some(seed) = args.seed {
        overrides.push(format!("seed={seed}"));
    }
    let config = ExperimentConfig::load(&args.config, &overrides)?;
    if let Command::ShowConfig(_) = cli.command {
        print!("{}", config.to_toml()?);
        return Ok(());
    }

    let base_dir = args.config.parent().map(PathBuf::from).unwrap_or_default();
    let run = Run {
        config: &config,
        base_dir: &base_dir,
    };
    let mut out = RunOutput::new(args.out.clone().unwrap_or_else(|| config.output_dir.clone()))?;
    let summary = match cli.command {
        Command::Encode(_) => run.encode(&mut out),
        Command::Predict(_) => run.predict(&mut out),
        Command::Spectrum(_) => run.spectrum(&mut out),
        Command::Sweep(_) => run.sweep(&mut out),
        Command::KernelCheck(_) => run.kernel_check(&mut out),
        Command::Residuals(_) => run.residuals(&mut out),
        Command::Centers(_) => run.centers(&mut out),
        Command::ShowConfig(_) => unreachable!("handled above"),
    }
    .with_context(|| format!("{} failed", cli.command.name()))?;
    manifest::write(&mut out, cli.command.name(), &config)?;
    println!("{}: {summary}", cli.command.name());
    println!("wrote {} files to {}", out.files().len(), out.dir().display());
    Ok(())
}
