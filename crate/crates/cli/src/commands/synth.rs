//! `craterlab synth`: render a synthetic crater tile with ground truth.
//!
//! Writes `<prefix>.bin` + `<prefix>.json` (or `<prefix>.asc`), the
//! ground-truth rim stream `<prefix>_truth.ndjson`, and a pixel-space
//! catalog `<prefix>_catalog.csv`.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use craterlab::catalog::write_pixel_catalog;
use craterlab::io::{save_dem, DemFormat};
use craterlab::synth::{generate, load_specs, TileSpec};

use crate::DemFormatArg;

#[derive(Args)]
pub struct SynthArgs {
    /// JSON list of crater specs.
    #[arg(long)]
    pub spec: PathBuf,
    /// Output path prefix.
    #[arg(long)]
    pub out_prefix: PathBuf,
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    #[arg(long, default_value_t = 512)]
    pub height: usize,
    /// Meters per pixel.
    #[arg(long, default_value_t = 100.0)]
    pub resolution: f64,
    #[arg(long, value_enum, default_value = "grid-binary")]
    pub format: DemFormatArg,
    #[arg(long, default_value_t = 2.0)]
    pub theta_step: f64,
}

pub fn run(args: SynthArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.spec)
        .with_context(|| format!("reading spec {}", args.spec.display()))?;
    let specs = load_specs(&text).with_context(|| format!("parsing {}", args.spec.display()))?;
    let tile = TileSpec {
        width: args.width,
        height: args.height,
        resolution_m: args.resolution,
    };
    let result = generate(&specs, tile, args.theta_step)?;
    for &(i, j) in &result.overlaps {
        eprintln!("synth: craters {i} and {j} overlap");
    }

    let (dem_path, format) = match args.format {
        DemFormatArg::AsciiGrid => (args.out_prefix.with_extension("asc"), DemFormat::AsciiGrid),
        _ => (args.out_prefix.with_extension("bin"), DemFormat::GridBinary),
    };
    save_dem(&result.dem, &dem_path, format)?;

    let truth_path = truth_path(&args.out_prefix);
    let mut truth = std::fs::File::create(&truth_path)
        .with_context(|| format!("creating {}", truth_path.display()))?;
    for rim in &result.ground_truth {
        writeln!(truth, "{}", rim.to_json())?;
    }

    let catalog_path = catalog_path(&args.out_prefix);
    let records: Vec<_> = result.ground_truth.iter().map(|r| r.crater.clone()).collect();
    let catalog_file = std::fs::File::create(&catalog_path)
        .with_context(|| format!("creating {}", catalog_path.display()))?;
    write_pixel_catalog(catalog_file, &records)?;

    eprintln!(
        "synth: wrote {} ({} craters), {}, {}",
        dem_path.display(),
        specs.len(),
        truth_path.display(),
        catalog_path.display()
    );
    Ok(())
}

fn truth_path(prefix: &PathBuf) -> PathBuf {
    append_suffix(prefix, "_truth.ndjson")
}

fn catalog_path(prefix: &PathBuf) -> PathBuf {
    append_suffix(prefix, "_catalog.csv")
}

fn append_suffix(prefix: &PathBuf, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}
