//! `craterlab render`: grayscale or hillshaded DEM with rim overlays.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use craterlab::io::load_dem;
use craterlab::rim::RimPolygon;

use crate::render::{draw_polygons, grayscale, hillshade};
use crate::{resolve_format, DemFormatArg};

#[derive(Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub dem: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: DemFormatArg,
    /// Rim JSON stream; an empty file renders the DEM alone.
    #[arg(long)]
    pub rims: PathBuf,
    /// Output PNG.
    #[arg(long)]
    pub out: PathBuf,
    /// Hillshaded shading instead of a linear grayscale stretch.
    #[arg(long)]
    pub hillshade: bool,
}

pub fn run(args: RenderArgs) -> Result<()> {
    let dem = load_dem(&args.dem, resolve_format(&args.dem, args.format))?;
    let text = std::fs::read_to_string(&args.rims)
        .with_context(|| format!("reading rims {}", args.rims.display()))?;
    let mut rims = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rim = RimPolygon::from_json(line)
            .with_context(|| format!("{}:{}", args.rims.display(), lineno + 1))?;
        rims.push(rim);
    }

    let mut img = if args.hillshade {
        hillshade(&dem)
    } else {
        grayscale(&dem)
    };
    draw_polygons(&mut img, &rims);
    img.save(&args.out)
        .with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!("render: {} with {} rims", args.out.display(), rims.len());
    Ok(())
}
