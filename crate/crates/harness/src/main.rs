use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use lgi_harness::{run, Mode, RunConfig};

#[derive(Parser)]
#[command(
    name = "lgi",
    version,
    about = "Lie group integrators: simulations, order studies and step-size control"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fixed-step run: writes trajectory.csv and invariants.csv.
    Simulate(Flags),
    /// Global error against a tight reference over a step-size ladder: writes order.csv.
    Converge(Flags),
    /// Error-controlled run with an embedded pair: adds steps.csv.
    Adapt(Flags),
}

/// Flags override the config file, which overrides the preset.
#[derive(Args)]
struct Flags {
    /// heavytop-body, heavytop-spatial, heavytop-lp, heavytop-ext, pendulum or quadrotor
    #[arg(long)]
    system: Option<String>,
    /// Scheme name or `symplectic`; converge accepts a comma-separated list
    /// and `name:aux` for the auxiliary solution of a pair.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat `key = value` file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for the optional random perturbation of the initial state.
    #[arg(long)]
    seed: Option<u64>,
    /// bruls-top or pendulum-chain
    #[arg(long)]
    preset: Option<String>,
}

fn build(flags: &Flags, mode: Mode) -> Result<RunConfig> {
    let mut cfg = RunConfig {
        mode,
        ..Default::default()
    };
    if let Some(p) = &flags.preset {
        cfg.apply_preset(p)?;
    }
    if let Some(path) = &flags.config {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        cfg.apply_str(&text)
            .with_context(|| path.display().to_string())?;
        // a preset flag still wins over a preset named in the file
        if let Some(p) = &flags.preset {
            if cfg.preset.as_deref() != Some(p) {
                cfg.apply_preset(p)?;
            }
        }
    }
    let pairs: [(&str, Option<String>); 9] = [
        ("system", flags.system.clone()),
        ("method", flags.method.clone()),
        ("h", flags.h.map(|v| v.to_string())),
        ("steps", flags.steps.map(|v| v.to_string())),
        ("tol", flags.tol.map(|v| v.to_string())),
        ("theta", flags.theta.map(|v| v.to_string())),
        ("t_end", flags.t_end.map(|v| v.to_string())),
        ("out", flags.out.as_ref().map(|p| p.display().to_string())),
        ("seed", flags.seed.map(|v| v.to_string())),
    ];
    for (k, v) in pairs {
        if let Some(v) = v {
            cfg.set(k, &v)
                .with_context(|| format!("--{}", k.replace('_', "-")))?;
        }
    }
    // a step given on the command line replaces the other kind from the file
    if flags.h.is_some() && flags.steps.is_none() {
        cfg.steps = None;
    }
    if flags.steps.is_some() && flags.h.is_none() {
        cfg.h = None;
    }
    cfg.mode = mode;
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (flags, mode) = match &cli.command {
        Command::Simulate(f) => (f, Mode::Fixed),
        Command::Converge(f) => (f, Mode::Converge),
        Command::Adapt(f) => (f, Mode::Adaptive),
    };
    match build(flags, mode).and_then(|cfg| run(&cfg)) {
        Ok(summary) => {
            for l in &summary.lines {
                println!("{l}");
            }
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
