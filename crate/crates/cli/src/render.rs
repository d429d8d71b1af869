//! DEM raster shading and polygon overlay drawing.

use craterlab::raster::DemRaster;
use craterlab::rim::RimPolygon;
use image::{Rgb, RgbImage};

const RIM_COLOR: Rgb<u8> = Rgb([220, 30, 30]);

/// Linear min–max stretch of the DEM to 8-bit grayscale.
pub fn grayscale(dem: &DemRaster) -> RgbImage {
    let mut min = f32::INFINITY;
    let mut max = f32::NEG_INFINITY;
    for &v in dem.elevations() {
        if dem.nodata().map_or(true, |nd| v != nd) {
            min = min.min(v);
            max = max.max(v);
        }
    }
    let range = if max > min { max - min } else { 1.0 };
    let mut img = RgbImage::new(dem.width() as u32, dem.height() as u32);
    for y in 0..dem.height() {
        for x in 0..dem.width() {
            let v = dem.elevations()[y * dem.width() + x];
            let g = if dem.nodata().map_or(false, |nd| v == nd) {
                0
            } else {
                (((v - min) / range) * 255.0).round().clamp(0.0, 255.0) as u8
            };
            img.put_pixel(x as u32, y as u32, Rgb([g, g, g]));
        }
    }
    img
}

/// Hillshaded rendering (light from the northwest at 45° altitude).
pub fn hillshade(dem: &DemRaster) -> RgbImage {
    let slope = dem.compute_slope();
    let azimuth: f64 = 315f64.to_radians();
    let altitude: f64 = 45f64.to_radians();
    let mut img = RgbImage::new(dem.width() as u32, dem.height() as u32);
    let clamp = |v: isize, hi: usize| -> usize { v.clamp(0, hi as isize - 1) as usize };
    for y in 0..dem.height() {
        for x in 0..dem.width() {
            let gx = (dem.get(clamp(x as isize + 1, dem.width()), y)
                - dem.get(clamp(x as isize - 1, dem.width()), y))
                / (2.0 * dem.resolution_m());
            let gy = (dem.get(x, clamp(y as isize + 1, dem.height()))
                - dem.get(x, clamp(y as isize - 1, dem.height())))
                / (2.0 * dem.resolution_m());
            let slope_rad = slope.get(x, y).to_radians();
            let aspect = gy.atan2(-gx);
            let shade = altitude.sin() * slope_rad.cos()
                + altitude.cos() * slope_rad.sin() * (azimuth - aspect).cos();
            let g = (shade.max(0.0) * 255.0).round().clamp(0.0, 255.0) as u8;
            img.put_pixel(x as u32, y as u32, Rgb([g, g, g]));
        }
    }
    img
}

/// Draws each rim polygon as a closed ring.
pub fn draw_polygons(img: &mut RgbImage, rims: &[RimPolygon]) {
    for rim in rims {
        let pts = rim.vertex_positions();
        for i in 0..pts.len() {
            let a = pts[i];
            let b = pts[(i + 1) % pts.len()];
            draw_segment(img, (a.x, a.y), (b.x, b.y));
        }
    }
}

fn draw_segment(img: &mut RgbImage, a: (f64, f64), b: (f64, f64)) {
    let steps = ((b.0 - a.0).abs().max((b.1 - a.1).abs()).ceil() as usize).max(1);
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let x = (a.0 + (b.0 - a.0) * t).round();
        let y = (a.1 + (b.1 - a.1) * t).round();
        if x >= 0.0 && y >= 0.0 && (x as u32) < img.width() && (y as u32) < img.height() {
            img.put_pixel(x as u32, y as u32, RIM_COLOR);
        }
    }
}
