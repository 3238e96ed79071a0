//! Run configuration: command-line flags layered over an optional TOML file.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use stark_walk::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "stark-walk", version, args_override_self = true)]
#[command(about = "Particle in a tilted lattice kicked by thermal atoms")]
pub struct Cli {
    /// Atomic Bohr frequency.
    #[arg(long = "E", global = true)]
    pub e: Option<f64>,
    /// Static force, must be positive.
    #[arg(long = "F", global = true)]
    pub f: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// TOML file with the same keys; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file. Defaults to `$STARK_WALK_OUT_DIR/<experiment>.<ext>`, or
    /// stdout when the variable is unset.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of atoms in the brute-force reservoir.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of lattice sites in the working window.
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wannier–Stark levels and their localization lengths.
    Spectrum(Options),
    /// Mean position of the particle coupled to one atom.
    SingleAtom(Options),
    /// Repeated application of the reduced channel.
    ChannelEvolve(Options),
    /// Monte Carlo histogram of the walk with its exact law.
    Walk(Options),
    /// Closed and numeric rate functions on a grid.
    Rate(Options),
    /// Energy two-time measurement statistics by brute force.
    FcsEnergy(Options),
    /// Position two-time measurement statistics through the channel.
    FcsPosition(Options),
    /// Run every end-to-end check.
    VerifyAll(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Spectrum,
    SingleAtom,
    ChannelEvolve,
    Walk,
    Rate,
    FcsEnergy,
    FcsPosition,
    VerifyAll,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::SingleAtom => "single-atom",
            Experiment::ChannelEvolve => "channel-evolve",
            Experiment::Walk => "walk",
            Experiment::Rate => "rate",
            Experiment::FcsEnergy => "fcs-energy",
            Experiment::FcsPosition => "fcs-position",
            Experiment::VerifyAll => "verify-all",
        }
    }
}

/// Keys accepted in the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "E")]
    pub e: Option<f64>,
    #[serde(rename = "F")]
    pub f: Option<f64>,
    pub lambda: Option<f64>,
    pub tau: Option<f64>,
    pub beta: Option<f64>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub window: Option<usize>,
    pub alpha: Option<f64>,
    pub eta: Option<f64>,
    pub points: Option<usize>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub experiment: Experiment,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub trials: Option<u64>,
    pub seed: u64,
    pub window: Option<usize>,
    pub alpha: Option<f64>,
    pub eta: Option<f64>,
    pub points: Option<usize>,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn require_n(&self) -> Result<usize, String> {
        self.n.ok_or_else(|| format!("{} needs `n` (--n or n in the config file)", self.experiment.name()))
    }
}

fn param(name: &str, flag: Option<f64>, file: Option<f64>) -> Result<f64, String> {
    flag.or(file)
        .ok_or_else(|| format!("missing parameter `{name}` (set --{name} or {name} in the config file)"))
}

pub fn parse_config(cli: Cli) -> Result<RunConfig, String> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let (experiment, opts) = match cli.command {
        Command::Spectrum(o) => (Experiment::Spectrum, o),
        Command::SingleAtom(o) => (Experiment::SingleAtom, o),
        Command::ChannelEvolve(o) => (Experiment::ChannelEvolve, o),
        Command::Walk(o) => (Experiment::Walk, o),
        Command::Rate(o) => (Experiment::Rate, o),
        Command::FcsEnergy(o) => (Experiment::FcsEnergy, o),
        Command::FcsPosition(o) => (Experiment::FcsPosition, o),
        Command::VerifyAll(o) => (Experiment::VerifyAll, o),
    };
    let params = ModelParams::new(
        param("E", cli.e, file.e)?,
        param("F", cli.f, file.f)?,
        param("lambda", cli.lambda, file.lambda)?,
        param("tau", cli.tau, file.tau)?,
        param("beta", cli.beta, file.beta)?,
    )
    .map_err(|e| e.to_string())?;
    let cfg = RunConfig {
        params,
        experiment,
        n: opts.n.or(file.n),
        m: opts.m.or(file.m),
        trials: opts.trials.or(file.trials),
        seed: opts.seed.or(file.seed).unwrap_or(0),
        window: opts.window.or(file.window),
        alpha: opts.alpha.or(file.alpha),
        eta: opts.eta.or(file.eta),
        points: opts.points.or(file.points),
        t_max: opts.t_max.or(file.t_max),
        steps: opts.steps.or(file.steps),
        format: cli.format.or(file.format).unwrap_or(Format::Csv),
        output: cli.output.or(file.output),
    };
    match experiment {
        Experiment::Walk => {
            cfg.require_n()?;
            if cfg.trials.is_none() {
                return Err("walk needs `trials` (--trials or trials in the config file)".into());
            }
        }
        Experiment::ChannelEvolve | Experiment::FcsEnergy | Experiment::FcsPosition => {
            cfg.require_n()?;
        }
        _ => {}
    }
    Ok(cfg)
}
