//! Command-line front end: `simulate`, `estimate`, `report` and `all`.
//!
//! A run is fully determined by its [`RunConfig`]; the `--seed`, `--kmax`,
//! `--window` and `--out` flags override the corresponding config fields.
//! Without `--config` the eight-state battery of [`RunConfig::battery`] is
//! used.

pub mod config;
pub mod pipeline;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{RunConfig, StateConfig, CONFIG_VERSION, VACUUM_LABEL};
pub use pipeline::{cmd_all, cmd_estimate, cmd_report, cmd_simulate, estimate_file, Layout, MomentFile};

use crate::error::Result;
use crate::phasestats::{UncertaintyReport, Window};

/// Exit code when the report flags an uncertainty-relation violation.
pub const EXIT_VIOLATION: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "homodyne-phase", version, about = "Canonical phase statistics by direct sampling of homodyne data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Highest exponential moment `k`.
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    /// Synthesis window: none or cesaro.
    #[arg(long, global = true)]
    pub window: Option<Window>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one record per state plus the vacuum reference.
    Simulate,
    /// Estimate moments from `.hrec` or `.hist` files (default: the configured states).
    Estimate { inputs: Vec<PathBuf> },
    /// Synthesize P(φ) and the uncertainty table from moment files.
    Report { inputs: Vec<PathBuf> },
    /// simulate, estimate and report.
    All,
}

impl Cli {
    /// The configuration after applying command-line overrides.
    pub fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::battery(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(k) = self.kmax {
            cfg.k_max = k;
        }
        if let Some(w) = self.window {
            cfg.window = w;
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs the parsed command and returns the process exit code: 0 on
/// success, [`EXIT_VIOLATION`] when the report flags a violation.
pub fn run(cli: &Cli) -> Result<u8> {
    let cfg = cli.run_config()?;
    let report: Option<UncertaintyReport> = match &cli.command {
        Command::Simulate => {
            for p in cmd_simulate(&cfg)? {
                println!("{}", p.display());
            }
            None
        }
        Command::Estimate { inputs } => {
            for p in cmd_estimate(inputs, &cfg)? {
                println!("{}", p.display());
            }
            None
        }
        Command::Report { inputs } => Some(cmd_report(inputs, &cfg)?),
        Command::All => Some(cmd_all(&cfg)?),
    };
    match report {
        Some(r) => {
            print!("{}", r.to_text());
            Ok(if r.violations().is_empty() { 0 } else { EXIT_VIOLATION })
        }
        None => Ok(0),
    }
}
