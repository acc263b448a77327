use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use plate_damage::io::{run_forward, run_gradcheck, run_identify, run_synth, RunConfig};

/// Damage identification in cantilevered plates from frequency response data.
#[derive(Parser)]
#[command(name = "plate-damage", version, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute FRFs of the configured design field (intact plate by default).
    Forward(Common),
    /// Write a synthetic noisy dataset of the configured notch.
    Synth(Common),
    /// Identify the damage field from measured or synthetic FRFs.
    Identify(Common),
    /// Compare adjoint and finite-difference gradients.
    Gradcheck {
        #[command(flatten)]
        common: Common,
        /// Fail when the largest relative error exceeds this.
        #[arg(long, default_value_t = 1e-5)]
        tolerance: f64,
    },
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Noise seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Lasso weight (overrides `lambda`).
    #[arg(long)]
    lambda: Option<f64>,
    /// Iteration cap (overrides `max_iterations`).
    #[arg(long)]
    max_iterations: Option<usize>,
    /// FRF dataset CSV (overrides `dataset`).
    #[arg(long)]
    dataset: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(lambda) = self.lambda {
            cfg.lambda = lambda;
        }
        if let Some(n) = self.max_iterations {
            cfg.max_iterations = n;
        }
        if let Some(path) = &self.dataset {
            cfg.dataset = Some(path.clone());
        }
        cfg.validate().context("invalid configuration")?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Forward(common) => {
            let cfg = common.resolve()?;
            let data = run_forward(&cfg, &cfg.output_dir)?;
            println!(
                "wrote {} frequencies x {} points to {}",
                data.frequency_count(),
                data.point_count(),
                cfg.output_dir.join("frf.csv").display()
            );
        }
        Command::Synth(common) => {
            let cfg = common.resolve()?;
            let data = run_synth(&cfg, &cfg.output_dir)?;
            println!(
                "wrote {} frequencies x {} points to {}",
                data.frequency_count(),
                data.point_count(),
                cfg.output_dir.join("dataset.csv").display()
            );
        }
        Command::Identify(common) => {
            let cfg = common.resolve()?;
            let result = run_identify(&cfg, &cfg.output_dir)?;
            let last = result.history.last().expect("history holds the initial state");
            println!(
                "{} after {} iterations: Q = {:.6e}, min chi = {:.4}",
                result.termination,
                last.iteration,
                last.q,
                result.field.values().iter().copied().fold(f64::INFINITY, f64::min)
            );
            println!("results in {}", cfg.output_dir.display());
        }
        Command::Gradcheck { common, tolerance } => {
            let cfg = common.resolve()?;
            let check = run_gradcheck(&cfg, &cfg.output_dir)?;
            println!("max relative error {:.3e} over {} elements", check.max_relative_error, check.adjoint.len());
            if !(check.max_relative_error <= tolerance) {
                eprintln!("error: gradient check exceeds tolerance {tolerance:e}");
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
