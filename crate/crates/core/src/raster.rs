//! Elevation and slope rasters with explicit georeferencing.
//!
//! Grids are immutable after construction; every operation here is a pure
//! read, so rasters can be shared freely across threads.

use thiserror::Error;

/// Mean lunar radius in meters, the default reference body.
pub const MOON_RADIUS_M: f64 = 1_737_400.0;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("invalid raster dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },
    #[error("resolution must be positive, got {0}")]
    InvalidResolution(f64),
    #[error("grid has {got} cells, expected {expected}")]
    CellCountMismatch { expected: usize, got: usize },
    #[error("non-finite elevation at cell ({x}, {y})")]
    NonFiniteValue { x: usize, y: usize },
    #[error("window entirely outside raster")]
    WindowOutside,
    #[error("half extent must be positive, got {0}")]
    InvalidHalfExtent(f64),
}

/// Why a point could not be sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("point outside raster bounds")]
    OutOfBounds,
    #[error("sample touches a nodata cell")]
    Nodata,
}

/// A sub-pixel position on the pixel grid. `x` is the column, `y` the row.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PixelPoint {
    pub x: f64,
    pub y: f64,
}

impl PixelPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: PixelPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Elevation grid in meters with georeferencing metadata.
///
/// `origin` is the geographic position of pixel (0, 0); rows grow southward,
/// columns eastward. Elevations are stored as `f32` to match the on-disk
/// payload; all sampling APIs return `f64`.
#[derive(Debug, Clone)]
pub struct DemRaster {
    width: usize,
    height: usize,
    resolution_m: f64,
    origin_lon_deg: f64,
    origin_lat_deg: f64,
    body_radius_m: f64,
    nodata: Option<f32>,
    elevations: Vec<f32>,
}

impl DemRaster {
    /// Builds a raster, validating dimensions, cell count, and finiteness.
    pub fn new(
        width: usize,
        height: usize,
        resolution_m: f64,
        origin_lon_deg: f64,
        origin_lat_deg: f64,
        body_radius_m: f64,
        nodata: Option<f32>,
        elevations: Vec<f32>,
    ) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::InvalidDimensions { width, height });
        }
        if !(resolution_m > 0.0) {
            return Err(RasterError::InvalidResolution(resolution_m));
        }
        if elevations.len() != width * height {
            return Err(RasterError::CellCountMismatch {
                expected: width * height,
                got: elevations.len(),
            });
        }
        for (i, &v) in elevations.iter().enumerate() {
            let is_nodata = nodata.map_or(false, |nd| v == nd);
            if !is_nodata && !v.is_finite() {
                return Err(RasterError::NonFiniteValue {
                    x: i % width,
                    y: i / width,
                });
            }
        }
        Ok(Self {
            width,
            height,
            resolution_m,
            origin_lon_deg,
            origin_lat_deg,
            body_radius_m,
            nodata,
            elevations,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution_m(&self) -> f64 {
        self.resolution_m
    }

    pub fn origin_lon_deg(&self) -> f64 {
        self.origin_lon_deg
    }

    pub fn origin_lat_deg(&self) -> f64 {
        self.origin_lat_deg
    }

    pub fn body_radius_m(&self) -> f64 {
        self.body_radius_m
    }

    pub fn nodata(&self) -> Option<f32> {
        self.nodata
    }

    pub fn elevations(&self) -> &[f32] {
        &self.elevations
    }

    /// Raw cell value. Panics if out of range; prefer [`Self::sample_elevation`]
    /// for sub-pixel reads.
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.elevations[y * self.width + x] as f64
    }

    pub fn is_nodata_cell(&self, x: usize, y: usize) -> bool {
        match self.nodata {
            Some(nd) => self.elevations[y * self.width + x] == nd,
            None => false,
        }
    }

    /// Bilinear interpolation of the four surrounding cells; exact at integer
    /// coordinates. Valid domain is `0 ≤ x ≤ width−1`, `0 ≤ y ≤ height−1`.
    pub fn sample_elevation(&self, p: PixelPoint) -> Result<f64, SampleError> {
        if !p.x.is_finite() || !p.y.is_finite() {
            return Err(SampleError::OutOfBounds);
        }
        let max_x = (self.width - 1) as f64;
        let max_y = (self.height - 1) as f64;
        if p.x < 0.0 || p.y < 0.0 || p.x > max_x || p.y > max_y {
            return Err(SampleError::OutOfBounds);
        }
        // Anchor on the lower-left cell of the 2x2 neighborhood, clamped so
        // that x = width-1 lands on the last cell pair with fx = 1.
        let x0 = (p.x.floor() as usize).min(self.width.saturating_sub(2));
        let y0 = (p.y.floor() as usize).min(self.height.saturating_sub(2));
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = p.x - x0 as f64;
        let fy = p.y - y0 as f64;
        if self.is_nodata_cell(x0, y0)
            || self.is_nodata_cell(x1, y0)
            || self.is_nodata_cell(x0, y1)
            || self.is_nodata_cell(x1, y1)
        {
            return Err(SampleError::Nodata);
        }
        let v00 = self.get(x0, y0);
        let v10 = self.get(x1, y0);
        let v01 = self.get(x0, y1);
        let v11 = self.get(x1, y1);
        let top = v00 + (v10 - v00) * fx;
        let bottom = v01 + (v11 - v01) * fx;
        Ok(top + (bottom - top) * fy)
    }

    /// Slope magnitude raster via the Horn 3×3 kernel, in degrees.
    ///
    /// Border pixels use edge-replicated neighborhoods. Any pixel whose 3×3
    /// neighborhood touches nodata gets slope 0 and is flagged.
    pub fn compute_slope(&self) -> SlopeRaster {
        let w = self.width;
        let h = self.height;
        let mut values = vec![0.0f64; w * h];
        let mut flagged = vec![false; w * h];
        let clamp = |v: isize, hi: usize| -> usize { v.clamp(0, hi as isize - 1) as usize };
        for y in 0..h {
            for x in 0..w {
                let mut nb = [[0.0f64; 3]; 3];
                let mut touched_nodata = false;
                for (dy, row) in (-1isize..=1).zip(0..3usize) {
                    for (dx, col) in (-1isize..=1).zip(0..3usize) {
                        let sx = clamp(x as isize + dx, w);
                        let sy = clamp(y as isize + dy, h);
                        if self.is_nodata_cell(sx, sy) {
                            touched_nodata = true;
                        }
                        nb[row][col] = self.get(sx, sy);
                    }
                }
                let idx = y * w + x;
                if touched_nodata {
                    flagged[idx] = true;
                    continue;
                }
                let gx = ((nb[0][2] + 2.0 * nb[1][2] + nb[2][2])
                    - (nb[0][0] + 2.0 * nb[1][0] + nb[2][0]))
                    / (8.0 * self.resolution_m);
                let gy = ((nb[2][0] + 2.0 * nb[2][1] + nb[2][2])
                    - (nb[0][0] + 2.0 * nb[0][1] + nb[0][2]))
                    / (8.0 * self.resolution_m);
                values[idx] = (gx * gx + gy * gy).sqrt().atan().to_degrees();
            }
        }
        SlopeRaster {
            width: w,
            height: h,
            resolution_m: self.resolution_m,
            values,
            flagged,
        }
    }

    /// Crops the inclusive pixel cover of the square window
    /// `[center − half_extent, center + half_extent]²`, clamped to the raster.
    ///
    /// Returns the sub-raster and the clamped top-left offset in parent
    /// coordinates. Geographic origin is shifted so the window stays
    /// correctly georeferenced.
    pub fn crop_window(
        &self,
        center: PixelPoint,
        half_extent: f64,
    ) -> Result<(DemRaster, (usize, usize)), RasterError> {
        let (x0, y0, x1, y1) =
            window_bounds(center, half_extent, self.width, self.height)?;
        let ww = x1 - x0 + 1;
        let wh = y1 - y0 + 1;
        let mut cells = Vec::with_capacity(ww * wh);
        for y in y0..=y1 {
            cells.extend_from_slice(&self.elevations[y * self.width + x0..y * self.width + x1 + 1]);
        }
        let (lon, lat) = crate::postproc::pixel_to_lon_lat(
            PixelPoint::new(x0 as f64, y0 as f64),
            self,
        );
        let sub = DemRaster {
            width: ww,
            height: wh,
            resolution_m: self.resolution_m,
            origin_lon_deg: lon,
            origin_lat_deg: lat,
            body_radius_m: self.body_radius_m,
            nodata: self.nodata,
            elevations: cells,
        };
        Ok((sub, (x0, y0)))
    }
}

/// Inclusive integer cover of `[c − h, c + h]` on both axes, clamped to the
/// grid. Errors when the window misses the raster entirely or `h ≤ 0`.
pub(crate) fn window_bounds(
    center: PixelPoint,
    half_extent: f64,
    width: usize,
    height: usize,
) -> Result<(usize, usize, usize, usize), RasterError> {
    if !(half_extent > 0.0) {
        return Err(RasterError::InvalidHalfExtent(half_extent));
    }
    let lo_x = (center.x - half_extent).floor();
    let hi_x = (center.x + half_extent).ceil();
    let lo_y = (center.y - half_extent).floor();
    let hi_y = (center.y + half_extent).ceil();
    if hi_x < 0.0 || hi_y < 0.0 || lo_x > (width - 1) as f64 || lo_y > (height - 1) as f64 {
        return Err(RasterError::WindowOutside);
    }
    let x0 = lo_x.max(0.0) as usize;
    let y0 = lo_y.max(0.0) as usize;
    let x1 = (hi_x as usize).min(width - 1);
    let y1 = (hi_y as usize).min(height - 1);
    Ok((x0, y0, x1, y1))
}

/// Per-pixel slope magnitude in degrees, derived from a DEM.
#[derive(Debug, Clone)]
pub struct SlopeRaster {
    width: usize,
    height: usize,
    resolution_m: f64,
    values: Vec<f64>,
    /// True where the source neighborhood touched nodata (value forced to 0).
    flagged: Vec<bool>,
}

impl SlopeRaster {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution_m(&self) -> f64 {
        self.resolution_m
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn is_flagged(&self, x: usize, y: usize) -> bool {
        self.flagged[y * self.width + x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Same inclusive-cover cropping as [`DemRaster::crop_window`].
    pub fn crop_window(
        &self,
        center: PixelPoint,
        half_extent: f64,
    ) -> Result<(SlopeRaster, (usize, usize)), RasterError> {
        let (x0, y0, x1, y1) =
            window_bounds(center, half_extent, self.width, self.height)?;
        let ww = x1 - x0 + 1;
        let wh = y1 - y0 + 1;
        let mut values = Vec::with_capacity(ww * wh);
        let mut flagged = Vec::with_capacity(ww * wh);
        for y in y0..=y1 {
            values.extend_from_slice(&self.values[y * self.width + x0..y * self.width + x1 + 1]);
            flagged.extend_from_slice(&self.flagged[y * self.width + x0..y * self.width + x1 + 1]);
        }
        Ok((
            SlopeRaster {
                width: ww,
                height: wh,
                resolution_m: self.resolution_m,
                values,
                flagged,
            },
            (x0, y0),
        ))
    }
}

/// Foreground/background grid used by the morphology pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width * height);
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Bounds-checked read; out-of-range coordinates are background.
    pub fn get_checked(&self, x: isize, y: isize) -> bool {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            false
        } else {
            self.bits[y as usize * self.width + x as usize]
        }
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count_foreground(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}
