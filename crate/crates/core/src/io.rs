//! DEM file formats: grid-binary (f32 payload + JSON sidecar) and ESRI
//! ASCII grid, plus PGM mask dumps for debugging.
//!
//! Grid-binary is the canonical format: `<name>.bin` holds little-endian
//! 32-bit floats, row-major, and `<name>.json` carries the georeferencing.
//! ASCII grid is provided for interoperability with GIS tools.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{BinaryMask, DemRaster, RasterError, MOON_RADIUS_M};

#[derive(Debug, Error)]
pub enum DemIoError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed header in {path}: {reason}")]
    MalformedHeader { path: PathBuf, reason: String },
    #[error("{path}: header declares {expected} cells but payload has {got}")]
    SizeMismatch {
        path: PathBuf,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Raster(#[from] RasterError),
}

/// On-disk DEM encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemFormat {
    /// f32 little-endian payload + JSON sidecar.
    GridBinary,
    /// ESRI-style ASCII grid.
    AsciiGrid,
}

/// Sidecar metadata for the grid-binary format.
#[derive(Debug, Serialize, Deserialize)]
struct GridBinarySidecar {
    width: usize,
    height: usize,
    resolution_m: f64,
    origin_lon_deg: f64,
    origin_lat_deg: f64,
    #[serde(default = "default_body_radius")]
    body_radius_m: f64,
    #[serde(default)]
    nodata: Option<f32>,
}

fn default_body_radius() -> f64 {
    MOON_RADIUS_M
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DemIoError + '_ {
    move |source| DemIoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Loads a DEM in the declared format.
pub fn load_dem(path: &Path, format: DemFormat) -> Result<DemRaster, DemIoError> {
    match format {
        DemFormat::GridBinary => load_grid_binary(path),
        DemFormat::AsciiGrid => load_ascii_grid(path),
    }
}

/// Saves a DEM in the requested format. For grid-binary, `path` names the
/// payload file and the sidecar is written next to it.
pub fn save_dem(dem: &DemRaster, path: &Path, format: DemFormat) -> Result<(), DemIoError> {
    match format {
        DemFormat::GridBinary => save_grid_binary(dem, path),
        DemFormat::AsciiGrid => save_ascii_grid(dem, path),
    }
}

fn sidecar_path(payload: &Path) -> PathBuf {
    payload.with_extension("json")
}

fn load_grid_binary(path: &Path) -> Result<DemRaster, DemIoError> {
    let sidecar = sidecar_path(path);
    let meta_text = fs::read_to_string(&sidecar).map_err(io_err(&sidecar))?;
    let meta: GridBinarySidecar =
        serde_json::from_str(&meta_text).map_err(|e| DemIoError::MalformedHeader {
            path: sidecar.clone(),
            reason: e.to_string(),
        })?;
    let payload = fs::read(path).map_err(io_err(path))?;
    if payload.len() % 4 != 0 {
        return Err(DemIoError::MalformedHeader {
            path: path.to_path_buf(),
            reason: format!("payload length {} is not a multiple of 4", payload.len()),
        });
    }
    let cells: Vec<f32> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    if cells.len() != meta.width * meta.height {
        return Err(DemIoError::SizeMismatch {
            path: path.to_path_buf(),
            expected: meta.width * meta.height,
            got: cells.len(),
        });
    }
    Ok(DemRaster::new(
        meta.width,
        meta.height,
        meta.resolution_m,
        meta.origin_lon_deg,
        meta.origin_lat_deg,
        meta.body_radius_m,
        meta.nodata,
        cells,
    )?)
}

fn save_grid_binary(dem: &DemRaster, path: &Path) -> Result<(), DemIoError> {
    let meta = GridBinarySidecar {
        width: dem.width(),
        height: dem.height(),
        resolution_m: dem.resolution_m(),
        origin_lon_deg: dem.origin_lon_deg(),
        origin_lat_deg: dem.origin_lat_deg(),
        body_radius_m: dem.body_radius_m(),
        nodata: dem.nodata(),
    };
    let sidecar = sidecar_path(path);
    fs::write(
        &sidecar,
        serde_json::to_string_pretty(&meta).expect("sidecar serializes"),
    )
    .map_err(io_err(&sidecar))?;
    let mut bytes = Vec::with_capacity(dem.elevations().len() * 4);
    for v in dem.elevations() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(io_err(path))
}

/// Parses an ESRI ASCII grid. Accepts both `xllcorner`/`yllcorner` and
/// `xllcenter`/`yllcenter` registration; `cellsize` is meters per pixel and
/// the corner coordinates are degrees. The body radius defaults to the Moon
/// since the header cannot carry it.
fn load_ascii_grid(path: &Path) -> Result<DemRaster, DemIoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let malformed = |reason: String| DemIoError::MalformedHeader {
        path: path.to_path_buf(),
        reason,
    };

    let mut ncols = None;
    let mut nrows = None;
    let mut xll = None;
    let mut yll = None;
    let mut corner_registered = true;
    let mut cellsize = None;
    let mut nodata = None;
    let mut tokens = text.split_whitespace().peekable();
    // Header: keyword/value pairs until the first purely numeric token.
    while let Some(&tok) = tokens.peek() {
        let key = tok.to_ascii_lowercase();
        let is_header_key = matches!(
            key.as_str(),
            "ncols" | "nrows" | "xllcorner" | "yllcorner" | "xllcenter" | "yllcenter"
                | "cellsize" | "nodata_value"
        );
        if !is_header_key {
            break;
        }
        tokens.next();
        let value = tokens
            .next()
            .ok_or_else(|| malformed(format!("missing value for {key}")))?;
        let parse = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| malformed(format!("bad numeric value {v:?} for {key}")))
        };
        match key.as_str() {
            "ncols" => ncols = Some(parse(value)? as usize),
            "nrows" => nrows = Some(parse(value)? as usize),
            "xllcorner" => xll = Some(parse(value)?),
            "yllcorner" => yll = Some(parse(value)?),
            "xllcenter" => {
                xll = Some(parse(value)?);
                corner_registered = false;
            }
            "yllcenter" => {
                yll = Some(parse(value)?);
                corner_registered = false;
            }
            "cellsize" => cellsize = Some(parse(value)?),
            "nodata_value" => nodata = Some(parse(value)? as f32),
            _ => unreachable!(),
        }
    }
    let width = ncols.ok_or_else(|| malformed("missing ncols".into()))?;
    let height = nrows.ok_or_else(|| malformed("missing nrows".into()))?;
    let cellsize = cellsize.ok_or_else(|| malformed("missing cellsize".into()))?;
    let xll = xll.ok_or_else(|| malformed("missing xllcorner".into()))?;
    let yll = yll.ok_or_else(|| malformed("missing yllcorner".into()))?;

    let mut cells = Vec::with_capacity(width * height);
    for tok in tokens {
        let v: f32 = tok
            .parse()
            .map_err(|_| malformed(format!("bad cell value {tok:?}")))?;
        cells.push(v);
    }
    if cells.len() != width * height {
        return Err(DemIoError::SizeMismatch {
            path: path.to_path_buf(),
            expected: width * height,
            got: cells.len(),
        });
    }

    // Recover the top-left pixel-center origin from the lower-left anchor.
    let body_radius = MOON_RADIUS_M;
    let half = if corner_registered { 0.5 } else { 0.0 };
    let origin_lon = xll + half * cellsize / (body_radius) * (180.0 / std::f64::consts::PI);
    let bottom_center_lat =
        yll + half * cellsize / body_radius * (180.0 / std::f64::consts::PI);
    let origin_lat = bottom_center_lat
        + (height as f64 - 1.0) * cellsize / body_radius * (180.0 / std::f64::consts::PI);
    Ok(DemRaster::new(
        width,
        height,
        cellsize,
        origin_lon,
        origin_lat,
        body_radius,
        nodata,
        cells,
    )?)
}

fn save_ascii_grid(dem: &DemRaster, path: &Path) -> Result<(), DemIoError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let deg_per_px = dem.resolution_m() / dem.body_radius_m() * (180.0 / std::f64::consts::PI);
    let xllcenter = dem.origin_lon_deg();
    let yllcenter = dem.origin_lat_deg() - (dem.height() as f64 - 1.0) * deg_per_px;
    let mut out = String::new();
    out.push_str(&format!("ncols {}\n", dem.width()));
    out.push_str(&format!("nrows {}\n", dem.height()));
    out.push_str(&format!("xllcenter {}\n", xllcenter));
    out.push_str(&format!("yllcenter {}\n", yllcenter));
    out.push_str(&format!("cellsize {}\n", dem.resolution_m()));
    if let Some(nd) = dem.nodata() {
        out.push_str(&format!("NODATA_value {}\n", nd));
    }
    for y in 0..dem.height() {
        let row: Vec<String> = (0..dem.width())
            .map(|x| format!("{}", dem.elevations()[y * dem.width() + x]))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    w.write_all(out.as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

/// Writes a mask as binary PGM (P5), foreground 255, background 0.
pub fn save_mask_pgm(mask: &BinaryMask, path: &Path) -> Result<(), DemIoError> {
    let mut bytes = format!("P5\n{} {}\n255\n", mask.width(), mask.height()).into_bytes();
    bytes.extend(mask.bits().iter().map(|&b| if b { 255u8 } else { 0u8 }));
    fs::write(path, bytes).map_err(io_err(path))
}

/// Writes the parent-raster offset of a cropped mask next to its PGM.
pub fn save_offset_json(offset: (usize, usize), path: &Path) -> Result<(), DemIoError> {
    let body = serde_json::json!({ "x_offset": offset.0, "y_offset": offset.1 });
    fs::write(path, serde_json::to_string_pretty(&body).expect("json")).map_err(io_err(path))
}
