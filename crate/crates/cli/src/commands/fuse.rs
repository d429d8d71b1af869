//! `craterlab fuse`: confidence-filter two detection streams, match them by
//! disk IoU, and average the shapes of matched pairs.
//!
//! Each input is either a detections CSV or a newline-delimited rim JSON
//! stream (detected by the leading `{`); rim records come in with
//! confidence 1.0.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;

use craterlab::fusion::{fuse_detection_sets, Provenance};
use craterlab::postproc::{read_detections_csv, Detection};
use craterlab::rim::RimPolygon;

use crate::config;

#[derive(Args)]
pub struct FuseArgs {
    /// First detection stream (CSV or rim JSON).
    #[arg(long)]
    pub dets_a: PathBuf,
    /// Second detection stream (CSV or rim JSON).
    #[arg(long)]
    pub dets_b: PathBuf,
    /// Pseudo-label confidence threshold (inclusive).
    #[arg(long, default_value_t = 0.85)]
    pub tau: f64,
    /// Cross-set match threshold on disk IoU.
    #[arg(long, default_value_t = 0.4)]
    pub delta_match: f64,
    /// Azimuth grid for shapes synthesized from bare detections.
    #[arg(long, default_value_t = 2.0)]
    pub theta_step: f64,
    /// Fused detections CSV with provenance column; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional fused rim JSON stream.
    #[arg(long)]
    pub out_rims: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn load_stream(path: &Path) -> Result<Vec<Detection>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading detections {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let mut out = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rim = RimPolygon::from_json(line)
                .with_context(|| format!("{}:{}", path.display(), lineno + 1))?;
            let mut det = Detection::new(
                rim.crater.id.clone(),
                rim.crater.center,
                rim.crater.radius_px,
                1.0,
            );
            det.rim = Some(rim);
            out.push(det);
        }
        Ok(out)
    } else {
        Ok(read_detections_csv(text.as_bytes())?)
    }
}

pub fn run(args: FuseArgs) -> Result<()> {
    let cfg = config::load(args.config.as_deref())?;
    let tau = config::or_flag(cfg.tau, args.tau);
    let delta_match = config::or_flag(cfg.delta_match, args.delta_match);
    let theta_step = config::or_flag(cfg.theta_step, args.theta_step);
    eprintln!("fuse: tau={tau} delta_match={delta_match}");

    let a = load_stream(&args.dets_a)?;
    let b = load_stream(&args.dets_b)?;
    let fused = fuse_detection_sets(&a, &b, tau, delta_match, theta_step)?;

    let mut out = super::open_output(args.out.as_deref())?;
    writeln!(out, "tile_id,x_px,y_px,radius_px,confidence,provenance")?;
    for f in &fused {
        let d = &f.detection;
        let tag = match f.provenance {
            Provenance::Pair => "pair",
            Provenance::OnlyA => "only_a",
            Provenance::OnlyB => "only_b",
        };
        writeln!(
            out,
            "{},{},{},{},{},{}",
            d.tile_id, d.center.x, d.center.y, d.radius_px, d.confidence, tag
        )?;
    }
    out.flush()?;

    if let Some(path) = &args.out_rims {
        let mut rims_out = std::fs::File::create(path)
            .with_context(|| format!("creating {}", path.display()))?;
        for f in &fused {
            if let Some(rim) = &f.detection.rim {
                writeln!(rims_out, "{}", rim.to_json())?;
            }
        }
    }
    eprintln!(
        "fuse: {} pairs, {} only_a, {} only_b",
        fused.iter().filter(|f| f.provenance == Provenance::Pair).count(),
        fused.iter().filter(|f| f.provenance == Provenance::OnlyA).count(),
        fused.iter().filter(|f| f.provenance == Provenance::OnlyB).count(),
    );
    Ok(())
}
