//! Command-line front end for `seqspace`: loads a config document (or a
//! named preset), runs one command and renders a text or json report.
//!
//! Exit codes: 0 success, 1 verification failure, 2 config parse error,
//! 3 validation error.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod presets;
pub mod verify;

use config::{OutputFormat, RunConfig, VectorSource};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("validation error: {0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Validation(_) => EXIT_VALIDATION,
        }
    }
}

impl From<seqspace::Error> for CliError {
    fn from(e: seqspace::Error) -> Self {
        Self::Validation(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Luxemburg-type norm of a sequence.
    Norm,
    /// Operator norm of L_A under both row functionals.
    Opnorm,
    /// Measure of noncompactness estimate with verdict and q_n series.
    Chi,
    /// Compactness verdict only.
    Classify,
    /// Brute-force oracle checks; exits 1 on any hard failure.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Norm => "norm",
            Self::Opnorm => "opnorm",
            Self::Chi => "chi",
            Self::Classify => "classify",
            Self::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "seqspace", version, about = "Norms, operator norms and noncompactness estimates on lacunary Orlicz difference sequence spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Config document (JSON).
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Named preset; `identity-assoc` when neither this nor --config is given.
    #[arg(long, global = true, value_name = "NAME")]
    pub preset: Option<String>,
    /// Report format; overrides the config's `output`.
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Row horizon.
    #[arg(long = "N", global = true, value_name = "INT")]
    pub n: Option<usize>,
    /// Block count.
    #[arg(long = "R", global = true, value_name = "INT")]
    pub r: Option<usize>,
    /// For `norm`: comma-separated x, `zero`, `e<i>` or `y:e<i>` (the x
    /// with Λ̄x = e<i>).
    #[arg(long, global = true, value_parser = VectorSource::parse)]
    pub vector: Option<VectorSource>,
    /// Perturbs the dual transform in the duality check (negative control).
    #[arg(long, global = true, hide = true)]
    pub debug_corrupt_dual: bool,
}

/// Rendered report and the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

/// Reads the config (file, preset or default preset) and applies CLI
/// overrides. The second value is the origin echoed in reports.
fn load(cli: &Cli) -> Result<(RunConfig, String), CliError> {
    let (text, origin) = match (&cli.config, &cli.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            (text, format!("file:{}", path.display()))
        }
        (None, name) => {
            let name = name.as_deref().unwrap_or(presets::DEFAULT_PRESET);
            let doc = presets::get(name).ok_or_else(|| {
                CliError::Config(format!(
                    "unknown preset `{name}`; available: {}",
                    presets::names().collect::<Vec<_>>().join(", ")
                ))
            })?;
            (doc.to_string(), format!("preset:{name}"))
        }
    };
    let mut config = config::parse(&text)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(n) = cli.n {
        config.analysis.n = n;
    }
    if let Some(r) = cli.r {
        config.analysis.r = Some(r);
    }
    if let Some(v) = &cli.vector {
        config.vector = Some(v.clone());
    }
    if let Some(o) = cli.output {
        config.output = o;
    }
    Ok((config, origin))
}

/// Runs one invocation without touching the process state.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let (config, origin) = load(cli)?;
    let resolved = config.resolve()?;
    let ctx = commands::Context {
        command: cli.command,
        origin,
        config: &config,
        resolved: &resolved,
    };
    let format = config.output;
    let (stdout, code) = match cli.command {
        Command::Norm => (commands::render(&commands::norm(&ctx)?, format), EXIT_OK),
        Command::Opnorm => (commands::render(&commands::opnorm(&ctx)?, format), EXIT_OK),
        Command::Chi => (commands::render(&commands::chi(&ctx)?, format), EXIT_OK),
        Command::Classify => (commands::render(&commands::classify(&ctx)?, format), EXIT_OK),
        Command::Verify => {
            let report = verify::run(&ctx, cli.debug_corrupt_dual)?;
            let code = if report.hard_failures > 0 { EXIT_VERIFY } else { EXIT_OK };
            (commands::render(&report, format), code)
        }
    };
    Ok(Outcome { stdout, code })
}
