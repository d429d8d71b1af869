//! Crater morphometry from a rim polygon and its DEM: diameter and depth
//! statistics over antipodal rim-point pairs, plus shape indices
//! (circularity, rectangle factor, sphericity, posture ratio and angle).

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    min_bounding_rectangle, point_in_polygon, polygon_area, polygon_centroid, polygon_perimeter,
};
use crate::raster::{DemRaster, PixelPoint, SampleError};
use crate::rim::RimPolygon;

#[derive(Debug, Error)]
pub enum MorphometryError {
    #[error("rim polygon has fewer than 3 points")]
    TooFewPoints,
    #[error("depth segment at azimuth {theta_deg} lies outside the raster")]
    SegmentOutOfBounds { theta_deg: f64 },
    #[error("rim polygon is degenerate (no bounding rectangle)")]
    DegeneratePolygon,
    #[error("perimeter is zero")]
    ZeroPerimeter,
}

/// Full per-crater morphometry record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CraterMorphometry {
    pub avg_diameter_m: f64,
    pub min_diameter_m: f64,
    pub max_diameter_m: f64,
    pub avg_depth_m: f64,
    pub min_depth_m: f64,
    pub max_depth_m: f64,
    /// (min depth)/(max depth); missing when max depth ≤ 0.
    pub depth_ratio: Option<f64>,
    pub depth_diameter_ratio: f64,
    pub circularity: f64,
    pub rectangle_factor: f64,
    pub sphericity: f64,
    pub posture_ratio: f64,
    pub posture_angle_deg: f64,
    pub fallback_fraction: f64,
    /// The polygon centroid fell outside the polygon; sphericity was
    /// computed anyway.
    pub centroid_outside: bool,
}

/// Diameter through the center at `theta_deg`: radial distances of the rim
/// points at `theta` and `theta + 180°` (snapped to the azimuth grid),
/// scaled to meters.
pub fn diameter_at(rim: &RimPolygon, theta_deg: f64, resolution_m: f64) -> f64 {
    let i = rim.index_for_azimuth(theta_deg);
    let j = rim.index_for_azimuth(theta_deg + 180.0);
    (rim.points[i].radial_distance_px + rim.points[j].radial_distance_px) * resolution_m
}

/// Depths of the two antipodal rim points at `theta_deg` relative to the
/// minimum elevation along the chord between them, in meters. Negative
/// values are reported as-is; they flag inverted topography.
pub fn depth_at(
    dem: &DemRaster,
    rim: &RimPolygon,
    theta_deg: f64,
) -> Result<(f64, f64), MorphometryError> {
    let a = rim.points[rim.index_for_azimuth(theta_deg)].position;
    let b = rim.points[rim.index_for_azimuth(theta_deg + 180.0)].position;
    let oob = || MorphometryError::SegmentOutOfBounds { theta_deg };
    let e_a = sample_or_skip(dem, a).ok_or_else(oob)?;
    let e_b = sample_or_skip(dem, b).ok_or_else(oob)?;
    let length = a.distance_to(b);
    let steps = length.ceil() as usize;
    let mut e_min = f64::INFINITY;
    for k in 0..=steps {
        let t = if steps == 0 {
            0.0
        } else {
            (k as f64 / steps as f64).min(1.0)
        };
        let p = PixelPoint::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t);
        if let Some(e) = sample_or_skip(dem, p) {
            e_min = e_min.min(e);
        }
    }
    if !e_min.is_finite() {
        return Err(oob());
    }
    Ok((e_a - e_min, e_b - e_min))
}

fn sample_or_skip(dem: &DemRaster, p: PixelPoint) -> Option<f64> {
    match dem.sample_elevation(p) {
        Ok(e) => Some(e),
        Err(SampleError::OutOfBounds) | Err(SampleError::Nodata) => None,
    }
}

/// Shoelace area and ring perimeter of the rim polygon, in meters² and
/// meters.
pub fn polygon_area_perimeter(rim: &RimPolygon, resolution_m: f64) -> (f64, f64) {
    let pts = rim.vertex_positions();
    (
        polygon_area(&pts) * resolution_m * resolution_m,
        polygon_perimeter(&pts) * resolution_m,
    )
}

/// `4πA/P²`: 1 for an ideal circle, lower for irregular rims.
pub fn circularity(area: f64, perimeter: f64) -> Result<f64, MorphometryError> {
    if perimeter <= 0.0 {
        return Err(MorphometryError::ZeroPerimeter);
    }
    Ok(4.0 * std::f64::consts::PI * area / (perimeter * perimeter))
}

/// `A / A_rect`: fullness of the crater versus its minimum bounding
/// rectangle.
pub fn rectangle_factor(area: f64, rect_area: f64) -> f64 {
    area / rect_area
}

/// Centroid-anchored sphericity: min over vertices of the distance to the
/// polygon centroid divided by the max. Returns (value, centroid_outside).
pub fn sphericity(rim: &RimPolygon) -> Result<(f64, bool), MorphometryError> {
    let pts = rim.vertex_positions();
    if pts.len() < 3 {
        return Err(MorphometryError::TooFewPoints);
    }
    let centroid = polygon_centroid(&pts);
    let mut r_in = f64::INFINITY;
    let mut r_out: f64 = 0.0;
    for p in &pts {
        let d = p.distance_to(centroid);
        r_in = r_in.min(d);
        r_out = r_out.max(d);
    }
    if r_out <= 0.0 {
        return Err(MorphometryError::DegeneratePolygon);
    }
    Ok((r_in / r_out, !point_in_polygon(centroid, &pts)))
}

/// Width/length ratio and orientation of the minimum bounding rectangle.
pub fn posture(rim: &RimPolygon) -> Result<(f64, f64), MorphometryError> {
    let rect = min_bounding_rectangle(&rim.vertex_positions())
        .ok_or(MorphometryError::DegeneratePolygon)?;
    Ok((rect.width / rect.length, rect.angle_deg))
}

/// Computes the full morphometry record for one crater.
pub fn compute_morphometry(
    dem: &DemRaster,
    rim: &RimPolygon,
) -> Result<CraterMorphometry, MorphometryError> {
    let n = rim.points.len();
    if n < 3 {
        return Err(MorphometryError::TooFewPoints);
    }
    let res = dem.resolution_m();

    // Each antipodal pair contributes one diameter and both point depths.
    let mut diameters = Vec::with_capacity(n / 2 + 1);
    let mut depths = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    for k in 0..n {
        if visited[k] {
            continue;
        }
        let theta = rim.points[k].azimuth_deg;
        let j = rim.index_for_azimuth(theta + 180.0);
        visited[k] = true;
        visited[j] = true;
        diameters.push(diameter_at(rim, theta, res));
        let (d_a, d_b) = depth_at(dem, rim, theta)?;
        depths.push(d_a);
        if j != k {
            depths.push(d_b);
        }
    }

    let fold_min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let fold_max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;

    let avg_diameter = mean(&diameters);
    let avg_depth = mean(&depths);
    let max_depth = fold_max(&depths);
    let depth_ratio = if max_depth > 0.0 {
        Some(fold_min(&depths) / max_depth)
    } else {
        None
    };

    let (area, perimeter) = polygon_area_perimeter(rim, res);
    let circ = circularity(area, perimeter)?;
    let rect = min_bounding_rectangle(&rim.vertex_positions())
        .ok_or(MorphometryError::DegeneratePolygon)?;
    let rect_area_m2 = rect.width * rect.length * res * res;
    let (sph, centroid_outside) = sphericity(rim)?;

    Ok(CraterMorphometry {
        avg_diameter_m: avg_diameter,
        min_diameter_m: fold_min(&diameters),
        max_diameter_m: fold_max(&diameters),
        avg_depth_m: avg_depth,
        min_depth_m: fold_min(&depths),
        max_depth_m: max_depth,
        depth_ratio,
        depth_diameter_ratio: avg_depth / avg_diameter,
        circularity: circ,
        rectangle_factor: rectangle_factor(area, rect_area_m2),
        sphericity: sph,
        posture_ratio: rect.width / rect.length,
        posture_angle_deg: rect.angle_deg,
        fallback_fraction: rim.fallback_fraction(),
        centroid_outside,
    })
}

#[derive(Serialize)]
struct MorphometryRow<'a> {
    id: &'a str,
    lon_deg: Option<f64>,
    lat_deg: Option<f64>,
    avg_diameter_m: f64,
    min_diameter_m: f64,
    max_diameter_m: f64,
    avg_depth_m: f64,
    min_depth_m: f64,
    max_depth_m: f64,
    depth_ratio: Option<f64>,
    depth_diameter_ratio: f64,
    circularity: f64,
    rectangle_factor: f64,
    sphericity: f64,
    posture_ratio: f64,
    posture_angle_deg: f64,
    fallback_fraction: f64,
}

/// Writes one CSV row per crater; `rows` pairs each rim polygon with its
/// computed morphometry.
pub fn write_morphometry_csv<W: Write>(
    out: W,
    rows: &[(&RimPolygon, &CraterMorphometry)],
) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for (rim, m) in rows {
        writer.serialize(MorphometryRow {
            id: &rim.crater.id,
            lon_deg: rim.crater.lon_deg,
            lat_deg: rim.crater.lat_deg,
            avg_diameter_m: m.avg_diameter_m,
            min_diameter_m: m.min_diameter_m,
            max_diameter_m: m.max_diameter_m,
            avg_depth_m: m.avg_depth_m,
            min_depth_m: m.min_depth_m,
            max_depth_m: m.max_depth_m,
            depth_ratio: m.depth_ratio,
            depth_diameter_ratio: m.depth_diameter_ratio,
            circularity: m.circularity,
            rectangle_factor: m.rectangle_factor,
            sphericity: m.sphericity,
            posture_ratio: m.posture_ratio,
            posture_angle_deg: m.posture_angle_deg,
            fallback_fraction: m.fallback_fraction,
        })?;
    }
    writer.flush()?;
    Ok(())
}

/// Header-only CSV for empty runs, matching the row schema.
pub fn morphometry_csv_header() -> &'static str {
    "id,lon_deg,lat_deg,avg_diameter_m,min_diameter_m,max_diameter_m,avg_depth_m,min_depth_m,\
     max_depth_m,depth_ratio,depth_diameter_ratio,circularity,rectangle_factor,sphericity,\
     posture_ratio,posture_angle_deg,fallback_fraction"
}
