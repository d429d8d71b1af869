//! Crater catalog CSV I/O.
//!
//! Two schemas: geographic `{id, lon_deg, lat_deg, diameter_km}` (the
//! default) and pixel-space `{id, x_px, y_px, radius_px}`. Geographic rows
//! are converted into pixel records against a DEM's georeferencing.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::postproc::lon_lat_to_pixel;
use crate::raster::{DemRaster, PixelPoint};
use crate::rim::CraterRecord;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("catalog row {row}: {reason}")]
    BadRow { row: usize, reason: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeoCatalogRow {
    pub id: String,
    pub lon_deg: f64,
    pub lat_deg: f64,
    pub diameter_km: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PixelCatalogRow {
    id: String,
    x_px: f64,
    y_px: f64,
    radius_px: f64,
}

pub fn read_geo_catalog<R: Read>(input: R) -> Result<Vec<GeoCatalogRow>, CatalogError> {
    let mut reader = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for (i, row) in reader.deserialize::<GeoCatalogRow>().enumerate() {
        let row = row.map_err(|e| CatalogError::BadRow {
            row: i + 1,
            reason: e.to_string(),
        })?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_pixel_catalog<R: Read>(input: R) -> Result<Vec<CraterRecord>, CatalogError> {
    let mut reader = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for (i, row) in reader.deserialize::<PixelCatalogRow>().enumerate() {
        let row = row.map_err(|e| CatalogError::BadRow {
            row: i + 1,
            reason: e.to_string(),
        })?;
        rows.push(CraterRecord::new(
            row.id,
            PixelPoint::new(row.x_px, row.y_px),
            row.radius_px,
        ));
    }
    Ok(rows)
}

/// Converts a geographic catalog row to a pixel-space record against the
/// DEM's georeferencing; keeps the geographic fields on the record.
pub fn geo_row_to_record(row: &GeoCatalogRow, dem: &DemRaster) -> CraterRecord {
    let center = lon_lat_to_pixel(row.lon_deg, row.lat_deg, dem);
    let radius_px = row.diameter_km * 1000.0 / (2.0 * dem.resolution_m());
    CraterRecord {
        id: row.id.clone(),
        center,
        radius_px,
        lon_deg: Some(row.lon_deg),
        lat_deg: Some(row.lat_deg),
        diameter_km: Some(row.diameter_km),
    }
}

pub fn write_pixel_catalog<W: Write>(
    out: W,
    records: &[CraterRecord],
) -> Result<(), CatalogError> {
    let mut writer = csv::Writer::from_writer(out);
    for r in records {
        writer.serialize(PixelCatalogRow {
            id: r.id.clone(),
            x_px: r.center.x,
            y_px: r.center.y,
            radius_px: r.radius_px,
        })?;
    }
    writer.flush()?;
    Ok(())
}
