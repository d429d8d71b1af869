//! `craterlab eval`: detections vs. ground truth, or F-score reproduction
//! from a precision/recall table.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use craterlab::catalog;
use craterlab::eval::{f_scores, match_to_ground_truth};
use craterlab::io::load_dem;
use craterlab::postproc::read_detections_csv;

use crate::config;
use crate::{resolve_format, DemFormatArg};

#[derive(Args)]
pub struct EvalArgs {
    /// Detections CSV (pixel space).
    #[arg(long, required_unless_present = "from_pr")]
    pub dets: Option<PathBuf>,
    /// Ground-truth catalog CSV.
    #[arg(long, required_unless_present = "from_pr")]
    pub gt: Option<PathBuf>,
    /// Ground truth is pixel-space `{id, x_px, y_px, radius_px}`.
    #[arg(long)]
    pub pixel_catalog: bool,
    /// DEM for converting a geographic ground-truth catalog.
    #[arg(long)]
    pub dem: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    pub format: DemFormatArg,
    /// Center tolerance as a fraction of the smaller radius.
    #[arg(long, default_value_t = 1.0)]
    pub dxy: f64,
    /// Radius tolerance as a fraction of the smaller radius.
    #[arg(long, default_value_t = 0.25)]
    pub dr: f64,
    /// Reproduction mode: CSV of precision,recall pairs (percent); emits
    /// F1/F2 per row instead of matching detections.
    #[arg(long)]
    pub from_pr: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: EvalArgs) -> Result<()> {
    if let Some(pr_path) = &args.from_pr {
        return run_from_pr(pr_path, args.out.as_deref());
    }
    let cfg = config::load(args.config.as_deref())?;
    let dxy = config::or_flag(cfg.dxy, args.dxy);
    let dr = config::or_flag(cfg.dr, args.dr);

    let dets_path = args.dets.as_ref().expect("clap enforces");
    let gt_path = args.gt.as_ref().expect("clap enforces");
    let dets_file = std::fs::File::open(dets_path)
        .with_context(|| format!("opening detections {}", dets_path.display()))?;
    let detections = read_detections_csv(dets_file)?;

    let gt_file = std::fs::File::open(gt_path)
        .with_context(|| format!("opening ground truth {}", gt_path.display()))?;
    let ground_truth = if args.pixel_catalog {
        catalog::read_pixel_catalog(gt_file)?
    } else {
        let Some(dem_path) = &args.dem else {
            bail!("geographic ground-truth catalog requires --dem for conversion");
        };
        let dem = load_dem(dem_path, resolve_format(dem_path, args.format))?;
        catalog::read_geo_catalog(gt_file)?
            .iter()
            .map(|row| catalog::geo_row_to_record(row, &dem))
            .collect()
    };

    let report = match_to_ground_truth(&detections, &ground_truth, dxy, dr);
    eprintln!("{}", report.to_table());
    let mut out = super::open_output(args.out.as_deref())?;
    writeln!(out, "{}", report.to_json())?;
    out.flush()?;
    Ok(())
}

fn run_from_pr(path: &PathBuf, out_path: Option<&std::path::Path>) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading P/R pairs {}", path.display()))?;
    let mut out = super::open_output(out_path)?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 2 {
            bail!("{}:{}: expected `precision,recall`", path.display(), lineno + 1);
        }
        let (Ok(p), Ok(r)) = (fields[0].parse::<f64>(), fields[1].parse::<f64>()) else {
            if lineno == 0 {
                continue; // header row
            }
            bail!("{}:{}: bad numeric fields", path.display(), lineno + 1);
        };
        let (f1, f2) = f_scores(p, r);
        writeln!(
            out,
            "{}",
            serde_json::json!({ "precision": p, "recall": r, "f1": f1, "f2": f2 })
        )?;
    }
    out.flush()?;
    Ok(())
}
