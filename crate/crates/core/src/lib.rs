//! Crater rim extraction and morphometry on digital elevation models.
//!
//! The pipeline stages are:
//!
//! 1. **raster** – DEM/slope grids with georeferencing, bilinear sampling,
//!    Horn slope, window cropping.
//! 2. **morphology** – binary morphology on the slope raster that isolates
//!    the candidate rim region around a cataloged crater.
//! 3. **rim** – per-azimuth adaptive rim point search along elevation
//!    profiles, gated by the rim-region mask, with circular fallback.
//! 4. **morphometry** – diameter/depth statistics and shape indices
//!    (circularity, rectangle factor, sphericity, posture) from a rim polygon.
//! 5. **postproc** – boundary-crater removal, non-maximum suppression,
//!    pixel→geographic conversion.
//! 6. **fusion** – confidence filtering and per-azimuth shape averaging
//!    between two detection sets.
//! 7. **eval** – matching against a ground-truth catalog; precision, recall,
//!    F1, F2.
//! 8. **synth** – synthetic crater DEM generator with analytic ground-truth
//!    rims, used as the quantitative oracle for the whole pipeline.

pub mod catalog;
pub mod eval;
pub mod fusion;
pub mod geometry;
pub mod io;
pub mod morphology;
pub mod morphometry;
pub mod postproc;
pub mod raster;
pub mod rim;
pub mod synth;

pub use raster::{BinaryMask, DemRaster, PixelPoint, SlopeRaster};
pub use rim::{CraterRecord, RimPoint, RimPolygon, RimSource};
