use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pbit_emu::experiment::{
    run_experiment, DeviceMode, ExperimentConfig, ExperimentKind, ResultManifest, Scale,
};
use pbit_emu::factorizer::FactorMode;
use pbit_emu::Error;

/// Quantum spin emulation with probabilistic bits.
#[derive(Parser)]
#[command(name = "pbit-emu", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment config. Without it the built-in preset for the
    /// subcommand and `--scale` is used.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = ScaleArg::Desk)]
    scale: ScaleArg,
}

#[derive(Subcommand)]
enum Command {
    /// Exact thermal distribution from the dense Hamiltonian.
    Exact,
    /// Sample the replica lattice with p-bit dynamics.
    Psl,
    /// Sampled and exact histograms side by side, with their TVD.
    Compare,
    /// Classical or quantum annealing of a classical chain.
    Anneal,
    /// Factor a number with the invertible multiplier.
    Factor(FactorArgs),
    /// Stochastic LLG device experiments.
    Device(DeviceArgs),
}

#[derive(Args)]
struct FactorArgs {
    /// Number to factor.
    n: Option<u64>,
    /// Operand width.
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    ensembles: Option<usize>,
}

#[derive(Args)]
struct DeviceArgs {
    #[arg(long, value_enum)]
    mode: Option<DeviceModeArg>,
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Desk,
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Ca,
    Sqa,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeviceModeArg {
    Trace,
    Transfer,
    Network,
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::Exact => ExperimentKind::Exact,
            Command::Psl => ExperimentKind::Psl,
            Command::Compare => ExperimentKind::Compare,
            Command::Anneal => ExperimentKind::Anneal,
            Command::Factor(_) => ExperimentKind::Factor,
            Command::Device(_) => ExperimentKind::Device,
        }
    }
}

fn missing(key: &str) -> Error {
    Error::Config {
        key: key.into(),
        reason: format!("section is required for `{key}` experiments"),
    }
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let kind = cli.command.kind();
    let mut cfg = match &cli.config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            if cfg.experiment != kind {
                return Err(Error::Config {
                    key: "experiment".into(),
                    reason: format!(
                        "config runs `{}` but the subcommand is `{}`",
                        cfg.experiment.name(),
                        kind.name()
                    ),
                });
            }
            cfg
        }
        None => {
            let scale = match cli.scale {
                ScaleArg::Desk => Scale::Desk,
                ScaleArg::Paper => Scale::Paper,
            };
            ExperimentConfig::preset(kind, scale, 1)
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    match &cli.command {
        Command::Factor(a) => {
            let f = cfg.factor.as_mut().ok_or_else(|| missing("factor"))?;
            if let Some(n) = a.n {
                f.product = n;
                f.forward = None;
            }
            if let Some(b) = a.bits {
                f.bits = b;
            }
            if let Some(m) = a.mode {
                f.mode = match m {
                    ModeArg::Ca => FactorMode::Ca,
                    ModeArg::Sqa => FactorMode::Sqa,
                };
                // presets carry no schedule, so the mode default applies
                if cli.config.is_none() {
                    cfg.schedule = None;
                }
            }
            if let Some(e) = a.ensembles {
                f.ensembles = e;
            }
        }
        Command::Device(a) => {
            let d = cfg.device.as_mut().ok_or_else(|| missing("device"))?;
            if let Some(m) = a.mode {
                d.mode = match m {
                    DeviceModeArg::Trace => DeviceMode::Trace,
                    DeviceModeArg::Transfer => DeviceMode::Transfer,
                    DeviceModeArg::Network => DeviceMode::Network,
                };
            }
            if let Some(s) = a.steps {
                d.steps = s;
            }
        }
        _ => {}
    }
    Ok(cfg)
}

fn report(manifest: &ResultManifest) {
    let dir = &manifest.config.output_dir;
    println!(
        "{} finished in {:.2} s, outputs in {}",
        manifest.config.experiment.name(),
        manifest.wall_seconds,
        dir.display()
    );
    for f in &manifest.files {
        println!("  {} ({} bytes)", f.path, f.bytes);
    }
    if let Ok(text) = std::fs::read_to_string(dir.join("summary.json")) {
        print!("{text}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match build_config(&cli).and_then(|cfg| run_experiment(&cfg)) {
        Ok(manifest) => {
            report(&manifest);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
