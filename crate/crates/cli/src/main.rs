//! Batch pipeline driver: rim extraction, morphometry, detection
//! post-processing, fusion, evaluation, synthetic tiles, and overlay
//! rendering.
//!
//! Data goes to stdout (or `--out`); progress and warnings go to stderr so
//! commands compose in shell pipelines.

mod commands;
mod config;
mod render;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "craterlab", version, about = "Crater rim extraction and morphometry on DEMs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemFormatArg {
    /// Infer from extension: `.asc` is ascii-grid, anything else grid-binary.
    Auto,
    GridBinary,
    AsciiGrid,
}

#[derive(Subcommand)]
enum Command {
    /// Extract rim polygons for every catalog crater on a DEM.
    Extract(commands::extract::ExtractArgs),
    /// Compute morphometry CSV from a DEM and a rim stream.
    Morphometry(commands::morphometry::MorphometryArgs),
    /// Boundary removal, NMS, and geographic conversion on detections.
    Postproc(commands::postproc::PostprocArgs),
    /// Fuse two detection streams by confidence filtering and shape averaging.
    Fuse(commands::fuse::FuseArgs),
    /// Match detections against a ground-truth catalog; print metrics.
    Eval(commands::eval::EvalArgs),
    /// Generate a synthetic DEM tile with ground-truth rims.
    Synth(commands::synth::SynthArgs),
    /// Render a DEM with rim overlays to PNG.
    Render(commands::render_cmd::RenderArgs),
}

fn main() {
    let cli = Cli::parse();
    let result: Result<()> = match cli.command {
        Command::Extract(args) => commands::extract::run(args),
        Command::Morphometry(args) => commands::morphometry::run(args),
        Command::Postproc(args) => commands::postproc::run(args),
        Command::Fuse(args) => commands::fuse::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Synth(args) => commands::synth::run(args),
        Command::Render(args) => commands::render_cmd::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

/// Resolves the DEM format, inferring from the extension when `Auto`.
pub fn resolve_format(path: &PathBuf, format: DemFormatArg) -> craterlab::io::DemFormat {
    match format {
        DemFormatArg::GridBinary => craterlab::io::DemFormat::GridBinary,
        DemFormatArg::AsciiGrid => craterlab::io::DemFormat::AsciiGrid,
        DemFormatArg::Auto => match path.extension().and_then(|e| e.to_str()) {
            Some("asc") => craterlab::io::DemFormat::AsciiGrid,
            _ => craterlab::io::DemFormat::GridBinary,
        },
    }
}
