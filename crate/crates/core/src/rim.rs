//! Adaptive rim point search along elevation profiles.
//!
//! For each azimuth a ray is cast from the catalog center. If the rim-region
//! mask shows no foreground along the ray, the point falls back to the
//! catalog circle. Otherwise a sliding window walks outward along the
//! elevation profile; the first window whose maximum lies strictly inside it
//! (and under 1.6r) yields the rim point.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morphology::{extract_rim_region, MorphParams, RimRegionMask};
use crate::raster::{DemRaster, PixelPoint, RasterError, SampleError, SlopeRaster};

/// Default azimuth step in degrees.
pub const DEFAULT_THETA_STEP_DEG: f64 = 2.0;
/// Default window advance in pixels.
pub const DEFAULT_L_STEP_PX: f64 = 5.0;

#[derive(Debug, Error)]
pub enum RimError {
    #[error("crater {id} is outside the raster")]
    OutsideRaster { id: String },
    #[error("360 is not an integer multiple of theta step {0}")]
    InvalidThetaStep(f64),
    #[error(transparent)]
    Raster(#[from] RasterError),
}

/// Catalog entry: center and radius in pixel space, plus optional
/// geographic fields carried through from the source catalog.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CraterRecord {
    pub id: String,
    pub center: PixelPoint,
    pub radius_px: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lon_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lat_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diameter_km: Option<f64>,
}

impl CraterRecord {
    pub fn new(id: impl Into<String>, center: PixelPoint, radius_px: f64) -> Self {
        Self {
            id: id.into(),
            center,
            radius_px,
            lon_deg: None,
            lat_deg: None,
            diameter_km: None,
        }
    }
}

/// How a rim point was determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RimSource {
    /// Elevation-profile maximum.
    Elevation,
    /// Catalog circle at radius r (degraded or unresolvable azimuth).
    CircularFallback,
}

/// One rim vertex at a fixed azimuth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RimPoint {
    pub position: PixelPoint,
    pub azimuth_deg: f64,
    pub radial_distance_px: f64,
    pub source: RimSource,
}

/// Closed, star-shaped rim polygon: one vertex per azimuth step.
#[derive(Debug, Clone)]
pub struct RimPolygon {
    pub crater: CraterRecord,
    pub points: Vec<RimPoint>,
    pub theta_step_deg: f64,
    pub l_step_px: f64,
}

impl RimPolygon {
    pub fn vertex_positions(&self) -> Vec<PixelPoint> {
        self.points.iter().map(|p| p.position).collect()
    }

    /// Fraction of vertices that fell back to the catalog circle.
    pub fn fallback_fraction(&self) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        let n = self
            .points
            .iter()
            .filter(|p| p.source == RimSource::CircularFallback)
            .count();
        n as f64 / self.points.len() as f64
    }

    /// Index of the vertex whose azimuth grid slot is nearest to `theta_deg`.
    pub fn index_for_azimuth(&self, theta_deg: f64) -> usize {
        let n = self.points.len();
        let k = (theta_deg / self.theta_step_deg).round() as i64;
        k.rem_euclid(n as i64) as usize
    }
}

/// Number of azimuth steps for a full turn; errors unless it divides 360
/// into a whole number of steps.
pub fn azimuth_count(theta_step_deg: f64) -> Result<usize, RimError> {
    if !(theta_step_deg > 0.0) {
        return Err(RimError::InvalidThetaStep(theta_step_deg));
    }
    let n = (360.0 / theta_step_deg).round();
    if n < 3.0 || (n * theta_step_deg - 360.0).abs() > 1e-9 {
        return Err(RimError::InvalidThetaStep(theta_step_deg));
    }
    Ok(n as usize)
}

fn ray_point(center: PixelPoint, theta_deg: f64, distance: f64) -> PixelPoint {
    let t = theta_deg.to_radians();
    PixelPoint::new(center.x + distance * t.cos(), center.y + distance * t.sin())
}

/// True iff any mask pixel within half a pixel of the ray segment between
/// `0.3r` and `1.6r` from the center is foreground. The ray is sampled at
/// 0.5-px steps, each sample rounded to the nearest pixel; samples outside
/// the mask are background.
pub fn ray_has_foreground(
    mask: &RimRegionMask,
    center: PixelPoint,
    theta_deg: f64,
    radius_px: f64,
) -> bool {
    let from = 0.3 * radius_px;
    let to = 1.6 * radius_px;
    let mut d = from;
    while d <= to + 1e-9 {
        let p = ray_point(center, theta_deg, d);
        if mask.foreground_at_parent(p.x, p.y) {
            return true;
        }
        d += 0.5;
    }
    false
}

/// A radial elevation profile sample: distance from center and elevation.
pub type ProfileSample = (f64, f64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("entire segment out of bounds")]
    OutOfBounds,
    #[error("profile touches nodata")]
    Nodata,
}

/// Samples `E(l)` at 1-px stride from `l_start` while `l ≤ l_end`.
/// Out-of-bounds samples truncate the sequence; a truncated-to-empty
/// profile is an error, as is any nodata hit.
pub fn elevation_profile(
    dem: &DemRaster,
    center: PixelPoint,
    theta_deg: f64,
    l_start: f64,
    l_end: f64,
) -> Result<Vec<ProfileSample>, ProfileError> {
    let mut samples = Vec::new();
    let mut l = l_start;
    while l <= l_end + 1e-9 {
        match dem.sample_elevation(ray_point(center, theta_deg, l)) {
            Ok(e) => samples.push((l, e)),
            Err(SampleError::OutOfBounds) => break,
            Err(SampleError::Nodata) => return Err(ProfileError::Nodata),
        }
        l += 1.0;
    }
    if samples.is_empty() {
        Err(ProfileError::OutOfBounds)
    } else {
        Ok(samples)
    }
}

/// Index of the maximum sample; ties resolve to the smallest `l`.
fn profile_argmax(samples: &[ProfileSample]) -> usize {
    let mut best = 0;
    for (i, s) in samples.iter().enumerate().skip(1) {
        if s.1 > samples[best].1 {
            best = i;
        }
    }
    best
}

fn fallback_point(crater: &CraterRecord, theta_deg: f64) -> RimPoint {
    RimPoint {
        position: ray_point(crater.center, theta_deg, crater.radius_px),
        azimuth_deg: theta_deg,
        radial_distance_px: crater.radius_px,
        source: RimSource::CircularFallback,
    }
}

/// Traces the rim point for one azimuth.
///
/// The sliding window starts at `[0.5r, r+10]` and advances by `l_step`. A
/// window's maximum is accepted only when it lies strictly left of the
/// window's last sample and under `1.6r`; otherwise the window slides, and
/// once its right edge has reached `1.6r` the azimuth falls back to the
/// catalog circle. The window is always searched before the `1.6r` bound is
/// consulted — for `r ≤ 10/0.6` the initial right edge already exceeds
/// `1.6r`, and checking first would make small craters unconditionally
/// fall back.
pub fn trace_rim_point(
    dem: &DemRaster,
    mask: &RimRegionMask,
    crater: &CraterRecord,
    theta_deg: f64,
    l_step: f64,
) -> RimPoint {
    let r = crater.radius_px;
    if !ray_has_foreground(mask, crater.center, theta_deg, r) {
        return fallback_point(crater, theta_deg);
    }
    let limit = 1.6 * r;
    let mut l_start = 0.5 * r;
    let mut l_end = r + 10.0;
    loop {
        match elevation_profile(dem, crater.center, theta_deg, l_start, l_end) {
            Ok(samples) => {
                if samples.len() >= 2 {
                    let idx = profile_argmax(&samples);
                    let (l_max, _) = samples[idx];
                    let (l_last, _) = samples[samples.len() - 1];
                    if l_max < l_last && l_max < limit {
                        return RimPoint {
                            position: ray_point(crater.center, theta_deg, l_max),
                            azimuth_deg: theta_deg,
                            radial_distance_px: l_max,
                            source: RimSource::Elevation,
                        };
                    }
                }
            }
            Err(ProfileError::Nodata) | Err(ProfileError::OutOfBounds) => {
                return fallback_point(crater, theta_deg);
            }
        }
        if l_end >= limit {
            return fallback_point(crater, theta_deg);
        }
        l_start += l_step;
        l_end += l_step;
    }
}

/// Extracts the full rim polygon: rim-region mask once, then one traced
/// point per azimuth step.
pub fn extract_rim(
    dem: &DemRaster,
    slope: &SlopeRaster,
    crater: &CraterRecord,
    theta_step_deg: f64,
    l_step: f64,
    params: &MorphParams,
) -> Result<RimPolygon, RimError> {
    let n = azimuth_count(theta_step_deg)?;
    let mask = extract_rim_region(slope, crater, params).map_err(|e| match e {
        RasterError::WindowOutside => RimError::OutsideRaster {
            id: crater.id.clone(),
        },
        other => RimError::Raster(other),
    })?;
    extract_rim_with_mask(dem, &mask, crater, theta_step_deg, l_step, n)
}

/// Rim tracing against a precomputed rim-region mask.
pub fn extract_rim_with_mask(
    dem: &DemRaster,
    mask: &RimRegionMask,
    crater: &CraterRecord,
    theta_step_deg: f64,
    l_step: f64,
    azimuths: usize,
) -> Result<RimPolygon, RimError> {
    let points = (0..azimuths)
        .map(|k| trace_rim_point(dem, mask, crater, k as f64 * theta_step_deg, l_step))
        .collect();
    Ok(RimPolygon {
        crater: crater.clone(),
        points,
        theta_step_deg,
        l_step_px: l_step,
    })
}

// --- serialization -----------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RimPointRecord {
    theta: f64,
    x: f64,
    y: f64,
    source: RimSource,
}

/// On-disk form of a rim polygon: one JSON object per crater, newline
/// delimited in batch streams.
#[derive(Serialize, Deserialize)]
struct RimPolygonRecord {
    id: String,
    center_px: [f64; 2],
    radius_px: f64,
    theta_step_deg: f64,
    points: Vec<RimPointRecord>,
}

impl RimPolygon {
    pub fn to_json(&self) -> String {
        let record = RimPolygonRecord {
            id: self.crater.id.clone(),
            center_px: [self.crater.center.x, self.crater.center.y],
            radius_px: self.crater.radius_px,
            theta_step_deg: self.theta_step_deg,
            points: self
                .points
                .iter()
                .map(|p| RimPointRecord {
                    theta: p.azimuth_deg,
                    x: p.position.x,
                    y: p.position.y,
                    source: p.source,
                })
                .collect(),
        };
        serde_json::to_string(&record).expect("rim polygon serializes")
    }

    pub fn from_json(line: &str) -> Result<Self, serde_json::Error> {
        let record: RimPolygonRecord = serde_json::from_str(line)?;
        let center = PixelPoint::new(record.center_px[0], record.center_px[1]);
        let crater = CraterRecord::new(record.id, center, record.radius_px);
        let points = record
            .points
            .iter()
            .map(|p| {
                let position = PixelPoint::new(p.x, p.y);
                RimPoint {
                    position,
                    azimuth_deg: p.theta,
                    radial_distance_px: center.distance_to(position),
                    source: p.source,
                }
            })
            .collect();
        Ok(RimPolygon {
            crater,
            points,
            theta_step_deg: record.theta_step_deg,
            l_step_px: DEFAULT_L_STEP_PX,
        })
    }
}

/// Builds the discretized catalog circle for a crater (all points marked
/// as fallback), used when a detection carries no traced rim.
pub fn circle_polygon(crater: &CraterRecord, theta_step_deg: f64) -> Result<RimPolygon, RimError> {
    let n = azimuth_count(theta_step_deg)?;
    let points = (0..n)
        .map(|k| fallback_point(crater, k as f64 * theta_step_deg))
        .collect();
    Ok(RimPolygon {
        crater: crater.clone(),
        points,
        theta_step_deg,
        l_step_px: DEFAULT_L_STEP_PX,
    })
}
