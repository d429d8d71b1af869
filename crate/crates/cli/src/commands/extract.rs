//! `craterlab extract`: rim polygons for every catalog crater on a DEM.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use rayon::prelude::*;

use craterlab::catalog;
use craterlab::io::{load_dem, save_mask_pgm, save_offset_json};
use craterlab::morphology::{
    extract_rim_region, extract_rim_region_steps, MorphParams, PipelineSteps, StructuringElement,
};
use craterlab::rim::{azimuth_count, extract_rim_with_mask, CraterRecord, RimError, RimPolygon};

use crate::config;
use crate::{resolve_format, DemFormatArg};

#[derive(Args)]
pub struct ExtractArgs {
    /// DEM payload path.
    #[arg(long)]
    pub dem: PathBuf,
    /// DEM on-disk format.
    #[arg(long, value_enum, default_value = "auto")]
    pub format: DemFormatArg,
    /// Crater catalog CSV.
    #[arg(long)]
    pub catalog: PathBuf,
    /// Catalog is pixel-space `{id, x_px, y_px, radius_px}` instead of
    /// geographic `{id, lon_deg, lat_deg, diameter_km}`.
    #[arg(long)]
    pub pixel_catalog: bool,
    /// Output rim JSON stream (newline-delimited); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Azimuth step in degrees.
    #[arg(long, default_value_t = 2.0)]
    pub theta_step: f64,
    /// Profile window advance in pixels.
    #[arg(long, default_value_t = 5.0)]
    pub l_step: f64,
    /// Minimum connected-component area in px² (default scales with radius).
    #[arg(long)]
    pub min_area: Option<usize>,
    /// Closing structuring-element radius.
    #[arg(long, default_value_t = 2)]
    pub closing_radius: u32,
    /// Opening structuring-element radius.
    #[arg(long, default_value_t = 1)]
    pub opening_radius: u32,
    /// Lower diameter bound in km.
    #[arg(long, default_value_t = 5.0)]
    pub min_diameter_km: f64,
    /// Upper diameter bound in km.
    #[arg(long, default_value_t = 20.0)]
    pub max_diameter_km: f64,
    /// Worker threads for per-crater extraction.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Directory for per-step mask dumps (PGM + offset JSON per crater).
    #[arg(long)]
    pub debug_steps: Option<PathBuf>,
    /// JSON config file overriding any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: ExtractArgs) -> Result<()> {
    let cfg = config::load(args.config.as_deref())?;
    let theta_step = config::or_flag(cfg.theta_step, args.theta_step);
    let l_step = config::or_flag(cfg.l_step, args.l_step);
    let jobs = config::or_flag(cfg.jobs, args.jobs).max(1);
    let min_diameter = config::or_flag(cfg.min_diameter_km, args.min_diameter_km);
    let max_diameter = config::or_flag(cfg.max_diameter_km, args.max_diameter_km);
    let debug_steps = cfg.debug_steps.clone().or(args.debug_steps.clone());
    let params = MorphParams {
        min_area: cfg.min_area.or(args.min_area),
        closing_se: StructuringElement::disk(args.closing_radius),
        opening_se: StructuringElement::disk(args.opening_radius),
    };
    let azimuths = azimuth_count(theta_step)?;

    let format = resolve_format(&args.dem, args.format);
    let dem = load_dem(&args.dem, format)?;
    let records = load_catalog(&args, &dem)?;
    let total = records.len();

    let (in_range, filtered): (Vec<CraterRecord>, Vec<CraterRecord>) =
        records.into_iter().partition(|r| {
            let diameter_km = r
                .diameter_km
                .unwrap_or(2.0 * r.radius_px * dem.resolution_m() / 1000.0);
            diameter_km >= min_diameter && diameter_km <= max_diameter
        });
    if !filtered.is_empty() {
        eprintln!(
            "extract: {} of {} craters outside {min_diameter}-{max_diameter} km, filtered",
            filtered.len(),
            total
        );
    }
    if let Some(dir) = &debug_steps {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("creating debug dir {}", dir.display()))?;
    }

    let slope = dem.compute_slope();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("building thread pool")?;
    let results: Vec<Result<RimPolygon, RimError>> = pool.install(|| {
        in_range
            .par_iter()
            .map(|record| {
                let to_rim_error = |e| match e {
                    craterlab::raster::RasterError::WindowOutside => RimError::OutsideRaster {
                        id: record.id.clone(),
                    },
                    other => RimError::Raster(other),
                };
                let mask = match &debug_steps {
                    None => extract_rim_region(&slope, record, &params).map_err(to_rim_error)?,
                    Some(dir) => {
                        let mut steps: PipelineSteps = Vec::new();
                        let mask =
                            extract_rim_region_steps(&slope, record, &params, &mut steps)
                                .map_err(to_rim_error)?;
                        for (i, (name, step_mask)) in steps.iter().enumerate() {
                            let path = dir.join(format!("{}_{}_{}.pgm", record.id, i + 1, name));
                            let _ = save_mask_pgm(step_mask, &path);
                        }
                        let _ = save_offset_json(
                            mask.offset,
                            &dir.join(format!("{}_offset.json", record.id)),
                        );
                        mask
                    }
                };
                extract_rim_with_mask(&dem, &mask, record, theta_step, l_step, azimuths)
            })
            .collect()
    });

    let mut out = super::open_output(args.out.as_deref())?;
    let mut skipped = 0usize;
    let mut written = 0usize;
    let mut fallback_sum = 0.0;
    for (record, result) in in_range.iter().zip(results) {
        match result {
            Ok(polygon) => {
                writeln!(out, "{}", polygon.to_json())?;
                fallback_sum += polygon.fallback_fraction();
                written += 1;
            }
            Err(RimError::OutsideRaster { .. }) => {
                eprintln!("extract: crater {} outside raster, skipped", record.id);
                skipped += 1;
            }
            Err(other) => return Err(other.into()),
        }
    }
    out.flush()?;
    eprintln!(
        "extract: {written} rims written, {skipped} skipped; mean fallback fraction {:.3}",
        if written > 0 {
            fallback_sum / written as f64
        } else {
            0.0
        }
    );
    Ok(())
}

fn load_catalog(args: &ExtractArgs, dem: &craterlab::raster::DemRaster) -> Result<Vec<CraterRecord>> {
    let file = std::fs::File::open(&args.catalog)
        .with_context(|| format!("opening catalog {}", args.catalog.display()))?;
    if args.pixel_catalog {
        Ok(catalog::read_pixel_catalog(file)?)
    } else {
        let rows = catalog::read_geo_catalog(file)?;
        Ok(rows
            .iter()
            .map(|row| catalog::geo_row_to_record(row, dem))
            .collect())
    }
}
