//! Detection post-processing: boundary-crater removal, greedy non-maximum
//! suppression on disk IoU, and pixel→geographic conversion.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{disk_iou, point_in_polygon};
use crate::raster::{DemRaster, PixelPoint};
use crate::rim::RimPolygon;

#[derive(Debug, Error)]
pub enum PostprocError {
    #[error("overlap threshold must lie in (0,1), got {0}")]
    InvalidThreshold(f64),
    #[error("boundary margin must be non-negative, got {0}")]
    InvalidMargin(f64),
    #[error("latitude {0} out of range after conversion")]
    LatitudeOutOfRange(f64),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// A crater hypothesis: center/radius in pixels, confidence in [0,1], and
/// optionally the traced rim shape.
#[derive(Debug, Clone)]
pub struct Detection {
    pub tile_id: String,
    pub center: PixelPoint,
    pub radius_px: f64,
    pub confidence: f64,
    pub rim: Option<RimPolygon>,
}

impl Detection {
    pub fn new(tile_id: impl Into<String>, center: PixelPoint, radius_px: f64, confidence: f64) -> Self {
        Self {
            tile_id: tile_id.into(),
            center,
            radius_px,
            confidence,
            rim: None,
        }
    }
}

/// Keeps a detection iff its full extent lies at least `margin` pixels
/// inside every tile edge.
pub fn remove_boundary_craters(
    detections: &[Detection],
    tile: (usize, usize),
    margin: f64,
) -> Result<Vec<Detection>, PostprocError> {
    if margin < 0.0 {
        return Err(PostprocError::InvalidMargin(margin));
    }
    let (w, h) = (tile.0 as f64, tile.1 as f64);
    Ok(detections
        .iter()
        .filter(|d| {
            d.center.x - d.radius_px >= margin
                && d.center.x + d.radius_px <= w - margin
                && d.center.y - d.radius_px >= margin
                && d.center.y + d.radius_px <= h - margin
        })
        .cloned()
        .collect())
}

/// Overlap measure used by [`nms`] and detection-set matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlapMeasure {
    /// Closed-form IoU of the two catalog disks.
    #[default]
    Disk,
    /// Rasterized IoU of the rim polygons; falls back to disks when either
    /// detection has no rim.
    PolygonMask,
}

/// Overlap between two detections under the chosen measure.
pub fn detection_iou(a: &Detection, b: &Detection, measure: OverlapMeasure) -> f64 {
    match measure {
        OverlapMeasure::Disk => disk_iou(a.center, a.radius_px, b.center, b.radius_px),
        OverlapMeasure::PolygonMask => match (&a.rim, &b.rim) {
            (Some(ra), Some(rb)) => polygon_mask_iou(ra, rb),
            _ => disk_iou(a.center, a.radius_px, b.center, b.radius_px),
        },
    }
}

/// Pixel-sampled IoU of two rim polygons over their joint bounding box.
fn polygon_mask_iou(a: &RimPolygon, b: &RimPolygon) -> f64 {
    let pa = a.vertex_positions();
    let pb = b.vertex_positions();
    let xs = pa.iter().chain(&pb).map(|p| p.x);
    let ys = pa.iter().chain(&pb).map(|p| p.y);
    let x0 = xs.clone().fold(f64::INFINITY, f64::min).floor() as i64;
    let x1 = xs.fold(f64::NEG_INFINITY, f64::max).ceil() as i64;
    let y0 = ys.clone().fold(f64::INFINITY, f64::min).floor() as i64;
    let y1 = ys.fold(f64::NEG_INFINITY, f64::max).ceil() as i64;
    let mut inter = 0u64;
    let mut union = 0u64;
    for y in y0..=y1 {
        for x in x0..=x1 {
            let p = PixelPoint::new(x as f64 + 0.5, y as f64 + 0.5);
            let in_a = point_in_polygon(p, &pa);
            let in_b = point_in_polygon(p, &pb);
            if in_a && in_b {
                inter += 1;
            }
            if in_a || in_b {
                union += 1;
            }
        }
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Greedy non-maximum suppression.
///
/// Detections are ranked by confidence (ties: larger radius, then input
/// order); the top detection is kept and every remaining one whose IoU with
/// it exceeds `delta` is dropped.
pub fn nms(
    detections: &[Detection],
    delta: f64,
    measure: OverlapMeasure,
) -> Result<Vec<Detection>, PostprocError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(PostprocError::InvalidThreshold(delta));
    }
    let mut order: Vec<usize> = (0..detections.len()).collect();
    order.sort_by(|&i, &j| {
        let a = &detections[i];
        let b = &detections[j];
        b.confidence
            .partial_cmp(&a.confidence)
            .unwrap()
            .then(b.radius_px.partial_cmp(&a.radius_px).unwrap())
            .then(i.cmp(&j))
    });
    let mut suppressed = vec![false; detections.len()];
    let mut kept_order: Vec<usize> = Vec::new();
    for (rank, &i) in order.iter().enumerate() {
        if suppressed[i] {
            continue;
        }
        kept_order.push(i);
        for &j in &order[rank + 1..] {
            if suppressed[j] {
                continue;
            }
            if detection_iou(&detections[i], &detections[j], measure) > delta {
                suppressed[j] = true;
            }
        }
    }
    // Preserve input order in the output for deterministic streams.
    kept_order.sort_unstable();
    Ok(kept_order.iter().map(|&i| detections[i].clone()).collect())
}

/// Geographic position of a detection center plus its diameter in km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPosition {
    pub lon_deg: f64,
    pub lat_deg: f64,
    pub diameter_km: f64,
}

/// Local equirectangular pixel→(lon, lat) conversion about the tile origin.
pub fn pixel_to_lon_lat(p: PixelPoint, dem: &DemRaster) -> (f64, f64) {
    let deg = 180.0 / std::f64::consts::PI;
    let lat = dem.origin_lat_deg() - (p.y * dem.resolution_m() / dem.body_radius_m()) * deg;
    let lon = dem.origin_lon_deg()
        + (p.x * dem.resolution_m() / (dem.body_radius_m() * lat.to_radians().cos())) * deg;
    (lon, lat)
}

/// Inverse of [`pixel_to_lon_lat`].
pub fn lon_lat_to_pixel(lon_deg: f64, lat_deg: f64, dem: &DemRaster) -> PixelPoint {
    let rad = std::f64::consts::PI / 180.0;
    let y = (dem.origin_lat_deg() - lat_deg) * rad * dem.body_radius_m() / dem.resolution_m();
    let x = (lon_deg - dem.origin_lon_deg()) * rad * dem.body_radius_m()
        * lat_deg.to_radians().cos()
        / dem.resolution_m();
    PixelPoint::new(x, y)
}

/// Converts a detection's pixel position to geographic coordinates.
pub fn pixel_to_geo(det: &Detection, dem: &DemRaster) -> Result<GeoPosition, PostprocError> {
    let (lon_deg, lat_deg) = pixel_to_lon_lat(det.center, dem);
    if lat_deg.abs() >= 90.0 {
        return Err(PostprocError::LatitudeOutOfRange(lat_deg));
    }
    Ok(GeoPosition {
        lon_deg,
        lat_deg,
        diameter_km: 2.0 * det.radius_px * dem.resolution_m() / 1000.0,
    })
}

// --- CSV serialization ---------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DetectionRow {
    tile_id: String,
    x_px: f64,
    y_px: f64,
    radius_px: f64,
    confidence: f64,
    lon_deg: Option<f64>,
    lat_deg: Option<f64>,
    diameter_km: Option<f64>,
}

/// Writes detections as CSV; geographic columns are filled when `geo` is
/// provided (parallel to `detections`).
pub fn write_detections_csv<W: Write>(
    out: W,
    detections: &[Detection],
    geo: Option<&[GeoPosition]>,
) -> Result<(), PostprocError> {
    let mut writer = csv::Writer::from_writer(out);
    for (i, d) in detections.iter().enumerate() {
        let g = geo.map(|g| g[i]);
        writer.serialize(DetectionRow {
            tile_id: d.tile_id.clone(),
            x_px: d.center.x,
            y_px: d.center.y,
            radius_px: d.radius_px,
            confidence: d.confidence,
            lon_deg: g.map(|g| g.lon_deg),
            lat_deg: g.map(|g| g.lat_deg),
            diameter_km: g.map(|g| g.diameter_km),
        })?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads detections from CSV (geographic columns optional and ignored).
pub fn read_detections_csv<R: Read>(input: R) -> Result<Vec<Detection>, PostprocError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(input);
    let mut out = Vec::new();
    for row in reader.deserialize::<DetectionRow>() {
        let row = row?;
        out.push(Detection::new(
            row.tile_id,
            PixelPoint::new(row.x_px, row.y_px),
            row.radius_px,
            row.confidence,
        ));
    }
    Ok(out)
}
