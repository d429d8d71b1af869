//! Detector-agnostic fusion of two detection streams: confidence filtering
//! of pseudo-labels, cross-set matching, and per-azimuth shape averaging.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::postproc::{detection_iou, Detection, OverlapMeasure};
use crate::raster::PixelPoint;
use crate::rim::{circle_polygon, CraterRecord, RimPoint, RimPolygon, RimSource};

/// Default pseudo-label confidence threshold.
pub const DEFAULT_TAU: f64 = 0.85;
/// Default cross-set match threshold (reuses the NMS overlap threshold).
pub const DEFAULT_DELTA_MATCH: f64 = 0.4;

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("theta step mismatch: {0} vs {1}")]
    ThetaStepMismatch(f64, f64),
    #[error("centers too far apart to fuse ({dist:.2} px > {max:.2} px)")]
    CentersTooFar { dist: f64, max: f64 },
    #[error("match threshold must lie in (0,1), got {0}")]
    InvalidThreshold(f64),
    #[error(transparent)]
    Rim(#[from] crate::rim::RimError),
}

/// Keeps detections whose confidence is at least `tau` (inclusive).
pub fn filter_pseudo_labels(detections: &[Detection], tau: f64) -> Vec<Detection> {
    detections
        .iter()
        .filter(|d| d.confidence >= tau)
        .cloned()
        .collect()
}

/// Cross-set correspondence: matched index pairs plus the leftovers.
#[derive(Debug, Clone, Default)]
pub struct MatchedSets {
    pub pairs: Vec<(usize, usize)>,
    pub only_a: Vec<usize>,
    pub only_b: Vec<usize>,
}

/// Greedy bipartite matching by descending disk IoU; a pair requires
/// IoU > `delta_match` and each detection is used at most once.
pub fn match_detection_sets(
    a: &[Detection],
    b: &[Detection],
    delta_match: f64,
) -> Result<MatchedSets, FusionError> {
    if !(delta_match > 0.0 && delta_match < 1.0) {
        return Err(FusionError::InvalidThreshold(delta_match));
    }
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, da) in a.iter().enumerate() {
        for (j, db) in b.iter().enumerate() {
            let iou = detection_iou(da, db, OverlapMeasure::Disk);
            if iou > delta_match {
                candidates.push((iou, i, j));
            }
        }
    }
    candidates.sort_by(|x, y| {
        y.0.partial_cmp(&x.0)
            .unwrap()
            .then(x.1.cmp(&y.1))
            .then(x.2.cmp(&y.2))
    });
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in candidates {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort_unstable();
    Ok(MatchedSets {
        pairs,
        only_a: (0..a.len()).filter(|&i| !used_a[i]).collect(),
        only_b: (0..b.len()).filter(|&j| !used_b[j]).collect(),
    })
}

/// Radial distance of a polygon, re-measured from `center` and resampled at
/// azimuth `theta_deg` by linear interpolation in azimuth.
fn radial_from_center(polygon: &RimPolygon, center: PixelPoint, theta_deg: f64) -> f64 {
    let mut samples: Vec<(f64, f64)> = polygon
        .points
        .iter()
        .map(|p| {
            let dx = p.position.x - center.x;
            let dy = p.position.y - center.y;
            (dy.atan2(dx).to_degrees().rem_euclid(360.0), (dx * dx + dy * dy).sqrt())
        })
        .collect();
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let theta = theta_deg.rem_euclid(360.0);
    let n = samples.len();
    if n == 1 {
        return samples[0].1;
    }
    // Bracketing samples with circular wraparound.
    let hi = samples.partition_point(|&(phi, _)| phi <= theta) % n;
    let lo = (hi + n - 1) % n;
    let (phi0, r0) = samples[lo];
    let (phi1, r1) = samples[hi];
    let span = (phi1 - phi0).rem_euclid(360.0);
    if span < 1e-12 {
        return r0;
    }
    let frac = (theta - phi0).rem_euclid(360.0) / span;
    r0 + (r1 - r0) * frac
}

fn nearest_source(polygon: &RimPolygon, theta_deg: f64) -> RimSource {
    polygon.points[polygon.index_for_azimuth(theta_deg)].source
}

/// Averages two rim shapes about the midpoint of their centers.
///
/// Both polygons are re-anchored to the common center, resampled on the
/// common azimuth grid, and averaged radially. Commutative in its two
/// arguments.
pub fn average_shapes(a: &RimPolygon, b: &RimPolygon) -> Result<RimPolygon, FusionError> {
    if (a.theta_step_deg - b.theta_step_deg).abs() > 1e-9 {
        return Err(FusionError::ThetaStepMismatch(
            a.theta_step_deg,
            b.theta_step_deg,
        ));
    }
    let dist = a.crater.center.distance_to(b.crater.center);
    let max = 1.6 * a.crater.radius_px.max(b.crater.radius_px);
    if dist > max {
        return Err(FusionError::CentersTooFar { dist, max });
    }
    let center = PixelPoint::new(
        (a.crater.center.x + b.crater.center.x) / 2.0,
        (a.crater.center.y + b.crater.center.y) / 2.0,
    );
    let theta_step = a.theta_step_deg;
    let n = a.points.len().max(b.points.len());
    let mut points = Vec::with_capacity(n);
    for k in 0..n {
        let theta = k as f64 * theta_step;
        let ra = radial_from_center(a, center, theta);
        let rb = radial_from_center(b, center, theta);
        let radius = (ra + rb) / 2.0;
        let t = theta.to_radians();
        let source = match (nearest_source(a, theta), nearest_source(b, theta)) {
            (RimSource::CircularFallback, RimSource::CircularFallback) => {
                RimSource::CircularFallback
            }
            _ => RimSource::Elevation,
        };
        points.push(RimPoint {
            position: PixelPoint::new(center.x + radius * t.cos(), center.y + radius * t.sin()),
            azimuth_deg: theta,
            radial_distance_px: radius,
            source,
        });
    }
    let (first, second) = if a.crater.id <= b.crater.id {
        (&a.crater.id, &b.crater.id)
    } else {
        (&b.crater.id, &a.crater.id)
    };
    let mut crater = CraterRecord::new(
        format!("{first}+{second}"),
        center,
        (a.crater.radius_px + b.crater.radius_px) / 2.0,
    );
    crater.lon_deg = None;
    crater.lat_deg = None;
    crater.diameter_km = None;
    Ok(RimPolygon {
        crater,
        points,
        theta_step_deg: theta_step,
        l_step_px: a.l_step_px,
    })
}

/// Which stream(s) a fused detection came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Pair,
    OnlyA,
    OnlyB,
}

/// A fused detection with its provenance tag.
#[derive(Debug, Clone)]
pub struct FusedDetection {
    pub detection: Detection,
    pub provenance: Provenance,
}

/// Full fusion driver: filter both sets by `tau`, match by disk IoU, average
/// the shapes of matched pairs, and pass singles through unchanged.
///
/// Detections without a traced rim are given their catalog circle before
/// averaging so every fused pair carries a shape.
pub fn fuse_detection_sets(
    a: &[Detection],
    b: &[Detection],
    tau: f64,
    delta_match: f64,
    theta_step_deg: f64,
) -> Result<Vec<FusedDetection>, FusionError> {
    let fa = filter_pseudo_labels(a, tau);
    let fb = filter_pseudo_labels(b, tau);
    let matched = match_detection_sets(&fa, &fb, delta_match)?;
    let ensure_rim = |d: &Detection, idx: usize| -> Result<RimPolygon, FusionError> {
        match &d.rim {
            Some(rim) => Ok(rim.clone()),
            None => {
                let record =
                    CraterRecord::new(format!("d{idx}"), d.center, d.radius_px);
                Ok(circle_polygon(&record, theta_step_deg)?)
            }
        }
    };
    let mut out = Vec::new();
    for &(i, j) in &matched.pairs {
        let ra = ensure_rim(&fa[i], i)?;
        let rb = ensure_rim(&fb[j], j)?;
        let fused_rim = average_shapes(&ra, &rb)?;
        let detection = Detection {
            tile_id: fa[i].tile_id.clone(),
            center: fused_rim.crater.center,
            radius_px: fused_rim.crater.radius_px,
            confidence: fa[i].confidence.max(fb[j].confidence),
            rim: Some(fused_rim),
        };
        out.push(FusedDetection {
            detection,
            provenance: Provenance::Pair,
        });
    }
    for &i in &matched.only_a {
        out.push(FusedDetection {
            detection: fa[i].clone(),
            provenance: Provenance::OnlyA,
        });
    }
    for &j in &matched.only_b {
        out.push(FusedDetection {
            detection: fb[j].clone(),
            provenance: Provenance::OnlyB,
        });
    }
    Ok(out)
}
