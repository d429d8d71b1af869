//! `craterlab postproc`: boundary-crater removal, NMS, and pixel→geo
//! conversion, in that order.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use craterlab::io::load_dem;
use craterlab::postproc::{
    nms, pixel_to_geo, read_detections_csv, remove_boundary_craters, write_detections_csv,
    GeoPosition, OverlapMeasure,
};

use crate::config;
use crate::{resolve_format, DemFormatArg};

#[derive(Args)]
pub struct PostprocArgs {
    /// DEM the detections were made on (tile bounds + georeferencing).
    #[arg(long)]
    pub dem: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: DemFormatArg,
    /// Detections CSV.
    #[arg(long)]
    pub dets: PathBuf,
    /// Boundary margin in pixels.
    #[arg(long, default_value_t = 15.0)]
    pub m: f64,
    /// NMS overlap threshold in (0,1).
    #[arg(long, default_value_t = 0.4)]
    pub delta: f64,
    /// Use rasterized polygon-mask IoU for rim-bearing detections.
    #[arg(long)]
    pub polygon_iou: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: PostprocArgs) -> Result<()> {
    let cfg = config::load(args.config.as_deref())?;
    let m = config::or_flag(cfg.m, args.m);
    let delta = config::or_flag(cfg.delta, args.delta);
    eprintln!("postproc: m={m} delta={delta}");

    let dem = load_dem(&args.dem, resolve_format(&args.dem, args.format))?;
    let file = std::fs::File::open(&args.dets)
        .with_context(|| format!("opening detections {}", args.dets.display()))?;
    let detections = read_detections_csv(file)?;
    let total = detections.len();

    let kept = remove_boundary_craters(&detections, (dem.width(), dem.height()), m)?;
    let measure = if args.polygon_iou {
        OverlapMeasure::PolygonMask
    } else {
        OverlapMeasure::Disk
    };
    let survivors = nms(&kept, delta, measure)?;
    let geo: Vec<GeoPosition> = survivors
        .iter()
        .map(|d| pixel_to_geo(d, &dem))
        .collect::<Result<_, _>>()?;

    let mut out = super::open_output(args.out.as_deref())?;
    write_detections_csv(&mut out, &survivors, Some(&geo))?;
    eprintln!(
        "postproc: {total} in, {} after boundary removal, {} after NMS",
        kept.len(),
        survivors.len()
    );
    Ok(())
}
