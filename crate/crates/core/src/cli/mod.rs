pub mod config;
mod bifurcate;
mod dispersion;
mod macro_cmd;
mod micro;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use springnet::io::{write_json, Manifest};
use springnet::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "springnet",
    version,
    about = "Particles on a dynamical spring network: micro simulation, macro solver, stability and bifurcation analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dispersion function scans, periodic mode tables and (alpha, beta) phase diagrams.
    #[command(args_override_self = true)]
    Dispersion(dispersion::DispersionArgs),
    /// Stochastic particle simulation with link creation and destruction.
    #[command(args_override_self = true)]
    Micro(micro::MicroArgs),
    /// Pseudospectral aggregation-diffusion solver.
    #[command(args_override_self = true)]
    Macro(macro_cmd::MacroArgs),
    /// Critical coupling, cubic coefficients and onset classification.
    #[command(args_override_self = true)]
    Bifurcate(bifurcate::BifurcateArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Base random seed; replica r uses seed + r.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Flat key = value file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Collects output paths and writes the manifest on every exit path.
pub struct Run {
    manifest: Manifest,
    dir: PathBuf,
}

impl Run {
    pub fn start<T: Serialize>(name: &str, common: &Common, resolved: &T) -> Result<Self> {
        std::fs::create_dir_all(&common.out)?;
        let config = serde_json::to_value(resolved)?;
        Ok(Self {
            manifest: Manifest::new(name, common.seed, config),
            dir: common.out.clone(),
        })
    }

    /// Path of an output file, recorded in the manifest.
    pub fn output(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.manifest.outputs.push(PathBuf::from(name));
        p
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn finish(mut self, result: Result<()>) -> Result<()> {
        self.manifest.status = match &result {
            Ok(()) => "ok".into(),
            Err(e) => format!("error: {e}"),
        };
        let written = write_json(&self.dir.join("manifest.json"), &self.manifest);
        result.and(written)
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Dispersion(a) => dispersion::run(a),
        Command::Micro(a) => micro::run(a),
        Command::Macro(a) => macro_cmd::run(a),
        Command::Bifurcate(a) => bifurcate::run(a),
    }
}

pub fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
