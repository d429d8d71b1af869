//! Synthetic crater DEM generator with analytic ground-truth rims.
//!
//! Each crater is a paraboloid bowl plus a Gaussian ridge centered on the
//! rim radius function — the simplest profile whose radial elevation
//! maximum sits exactly on the rim, which is what the adaptive rim search
//! assumes. Degraded sectors zero the ridge amplitude; seeded positional
//! noise keeps generation deterministic and order-independent.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::{DemRaster, PixelPoint, RasterError, MOON_RADIUS_M};
use crate::rim::{azimuth_count, CraterRecord, RimError, RimPoint, RimPolygon, RimSource};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("crater {index} does not fit in the tile")]
    CraterOutsideTile { index: usize },
    #[error("invalid crater spec {index}: {reason}")]
    InvalidSpec { index: usize, reason: String },
    #[error(transparent)]
    Rim(#[from] RimError),
    #[error(transparent)]
    Raster(#[from] RasterError),
}

/// Output tile shape.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TileSpec {
    pub width: usize,
    pub height: usize,
    pub resolution_m: f64,
}

impl Default for TileSpec {
    fn default() -> Self {
        Self {
            width: 512,
            height: 512,
            resolution_m: 100.0,
        }
    }
}

/// Rim radius as a function of azimuth, in pixels.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusProfile {
    Constant {
        radius_px: f64,
    },
    Ellipse {
        semi_major_px: f64,
        semi_minor_px: f64,
        angle_deg: f64,
    },
    /// Base radius perturbed by sinusoidal harmonics.
    Harmonic {
        base_px: f64,
        terms: Vec<HarmonicTerm>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub order: u32,
    pub amplitude_px: f64,
    pub phase_deg: f64,
}

impl RadiusProfile {
    pub fn at(&self, theta_deg: f64) -> f64 {
        match self {
            RadiusProfile::Constant { radius_px } => *radius_px,
            RadiusProfile::Ellipse {
                semi_major_px: a,
                semi_minor_px: b,
                angle_deg,
            } => {
                let t = (theta_deg - angle_deg).to_radians();
                a * b / ((b * t.cos()).powi(2) + (a * t.sin()).powi(2)).sqrt()
            }
            RadiusProfile::Harmonic { base_px, terms } => {
                base_px
                    + terms
                        .iter()
                        .map(|h| {
                            h.amplitude_px
                                * (h.order as f64 * theta_deg + h.phase_deg)
                                    .to_radians()
                                    .cos()
                        })
                        .sum::<f64>()
            }
        }
    }

    pub fn max_radius(&self) -> f64 {
        match self {
            RadiusProfile::Constant { radius_px } => *radius_px,
            RadiusProfile::Ellipse { semi_major_px, .. } => *semi_major_px,
            RadiusProfile::Harmonic { base_px, terms } => {
                base_px + terms.iter().map(|h| h.amplitude_px.abs()).sum::<f64>()
            }
        }
    }

    pub fn min_radius(&self) -> f64 {
        match self {
            RadiusProfile::Constant { radius_px } => *radius_px,
            RadiusProfile::Ellipse { semi_minor_px, .. } => *semi_minor_px,
            RadiusProfile::Harmonic { base_px, terms } => {
                base_px - terms.iter().map(|h| h.amplitude_px.abs()).sum::<f64>()
            }
        }
    }
}

/// One synthetic crater.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticCraterSpec {
    pub center: PixelPoint,
    pub radius: RadiusProfile,
    /// Bowl depth below the base plane, meters.
    pub depth_m: f64,
    /// Ridge peak height above the base plane, meters.
    pub rim_height_m: f64,
    /// Gaussian ridge sigma, pixels.
    pub rim_width_px: f64,
    /// Azimuth sectors `[from, to]` in degrees where the ridge amplitude is
    /// zero; `from > to` wraps through 0°.
    #[serde(default)]
    pub degraded_sectors: Vec<(f64, f64)>,
    /// Floor tilt along +x inside the bowl, meters per pixel.
    #[serde(default)]
    pub floor_tilt_m_per_px: f64,
    #[serde(default)]
    pub noise_sigma_m: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SyntheticCraterSpec {
    fn validate(&self, index: usize) -> Result<(), SynthError> {
        let err = |reason: &str| SynthError::InvalidSpec {
            index,
            reason: reason.to_string(),
        };
        if !(self.min_radius() > 3.0) {
            return Err(err("rim radius must exceed 3 px at every azimuth"));
        }
        if !(self.rim_width_px > 0.0) {
            return Err(err("rim width must be positive"));
        }
        if self.depth_m < 0.0 {
            return Err(err("depth must be non-negative"));
        }
        Ok(())
    }

    pub fn max_radius(&self) -> f64 {
        self.radius.max_radius()
    }

    pub fn min_radius(&self) -> f64 {
        self.radius.min_radius()
    }

    /// Catalog radius: mean rim radius over the azimuth grid.
    pub fn mean_radius(&self, theta_step_deg: f64) -> f64 {
        let n = (360.0 / theta_step_deg).round() as usize;
        (0..n)
            .map(|k| self.radius.at(k as f64 * theta_step_deg))
            .sum::<f64>()
            / n as f64
    }

    fn in_degraded_sector(&self, theta_deg: f64) -> bool {
        let theta = theta_deg.rem_euclid(360.0);
        self.degraded_sectors.iter().any(|&(from, to)| {
            let f = from.rem_euclid(360.0);
            let t = to.rem_euclid(360.0);
            if f <= t {
                theta >= f && theta <= t
            } else {
                theta >= f || theta <= t
            }
        })
    }

    /// Elevation contribution at a pixel, meters.
    pub fn elevation_at(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.center.x;
        let dy = y - self.center.y;
        let d = dx.hypot(dy);
        let rho_max = self.max_radius();
        let support = (rho_max + 6.0 * self.rim_width_px).max(NOISE_TAPER_END * rho_max);
        if d > support {
            return 0.0;
        }
        let theta = dy.atan2(dx).to_degrees().rem_euclid(360.0);
        let rho = self.radius.at(theta);
        let mut e = 0.0;
        if d < rho {
            // Bowl with zero gradient at the rim edge: a plain paraboloid
            // climbs ~2·depth/rho m/px right up to the rim, which drags the
            // discretized radial maximum off the ridge crest.
            let shape = 1.0 - (d / rho) * (d / rho);
            e -= self.depth_m * shape * shape;
        }
        if self.floor_tilt_m_per_px != 0.0 {
            // Full tilt through the bowl and across the rim, fading beyond
            // it; a hard cutoff at the rim would leave both rim points at
            // equal elevation and print a step into the slope field.
            let w = if d <= rho {
                1.0
            } else {
                let off = d - rho;
                (-off * off / (2.0 * (2.0 * self.rim_width_px).powi(2))).exp()
            };
            e += self.floor_tilt_m_per_px * dx * w;
        }
        if !self.in_degraded_sector(theta) {
            let off = d - rho;
            e += self.rim_height_m * (-off * off / (2.0 * self.rim_width_px * self.rim_width_px)).exp();
        }
        if self.noise_sigma_m > 0.0 {
            let taper = noise_taper(d / rho_max);
            if taper > 0.0 {
                e += self.noise_sigma_m * taper * gaussian_at(self.seed, x as i64, y as i64);
            }
        }
        e
    }

    /// Ground-truth rim polygon on the azimuth grid.
    pub fn ground_truth(&self, id: &str, theta_step_deg: f64) -> Result<RimPolygon, SynthError> {
        let n = azimuth_count(theta_step_deg)?;
        let crater = CraterRecord::new(id, self.center, self.mean_radius(theta_step_deg));
        let points = (0..n)
            .map(|k| {
                let theta = k as f64 * theta_step_deg;
                let rho = self.radius.at(theta);
                let t = theta.to_radians();
                RimPoint {
                    position: PixelPoint::new(
                        self.center.x + rho * t.cos(),
                        self.center.y + rho * t.sin(),
                    ),
                    azimuth_deg: theta,
                    radial_distance_px: rho,
                    source: RimSource::Elevation,
                }
            })
            .collect();
        Ok(RimPolygon {
            crater,
            points,
            theta_step_deg,
            l_step_px: crate::rim::DEFAULT_L_STEP_PX,
        })
    }
}

/// Noise is full-strength out to `NOISE_TAPER_START · rho_max`, fades
/// linearly, and is zero beyond `NOISE_TAPER_END · rho_max`. The fade keeps
/// the noise boundary from printing a slope edge inside any crater window.
const NOISE_TAPER_START: f64 = 2.0;
const NOISE_TAPER_END: f64 = 2.6;

fn noise_taper(d_over_rho_max: f64) -> f64 {
    if d_over_rho_max <= NOISE_TAPER_START {
        1.0
    } else if d_over_rho_max >= NOISE_TAPER_END {
        0.0
    } else {
        (NOISE_TAPER_END - d_over_rho_max) / (NOISE_TAPER_END - NOISE_TAPER_START)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn unit_open(h: u64) -> f64 {
    ((h >> 11) as f64 + 0.5) / 9_007_199_254_740_992.0
}

/// Standard normal sample as a pure function of (seed, pixel): evaluation
/// order and thread count cannot change the generated field.
fn gaussian_at(seed: u64, x: i64, y: i64) -> f64 {
    let h1 = splitmix64(splitmix64(splitmix64(seed) ^ x as u64) ^ y as u64);
    let h2 = splitmix64(h1);
    let u1 = unit_open(h1);
    let u2 = unit_open(h2);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Generated tile: DEM, ground-truth rims, and any overlapping crater pairs.
#[derive(Debug)]
pub struct SynthResult {
    pub dem: DemRaster,
    pub ground_truth: Vec<RimPolygon>,
    pub overlaps: Vec<(usize, usize)>,
}

/// Renders the crater superposition into a tile and samples the ground-truth
/// polygons at `theta_step_deg`.
pub fn generate(
    specs: &[SyntheticCraterSpec],
    tile: TileSpec,
    theta_step_deg: f64,
) -> Result<SynthResult, SynthError> {
    for (i, spec) in specs.iter().enumerate() {
        spec.validate(i)?;
        let margin = spec.max_radius() + 3.0 * spec.rim_width_px;
        let c = spec.center;
        if c.x - margin < 0.0
            || c.y - margin < 0.0
            || c.x + margin > (tile.width - 1) as f64
            || c.y + margin > (tile.height - 1) as f64
        {
            return Err(SynthError::CraterOutsideTile { index: i });
        }
    }
    let mut overlaps = Vec::new();
    for i in 0..specs.len() {
        for j in i + 1..specs.len() {
            let dist = specs[i].center.distance_to(specs[j].center);
            if dist < specs[i].max_radius() + specs[j].max_radius() {
                overlaps.push((i, j));
            }
        }
    }
    let mut cells = vec![0.0f32; tile.width * tile.height];
    for spec in specs {
        let support = (spec.max_radius() + 6.0 * spec.rim_width_px)
            .max(NOISE_TAPER_END * spec.max_radius());
        let x0 = ((spec.center.x - support).floor().max(0.0)) as usize;
        let y0 = ((spec.center.y - support).floor().max(0.0)) as usize;
        let x1 = ((spec.center.x + support).ceil() as usize).min(tile.width - 1);
        let y1 = ((spec.center.y + support).ceil() as usize).min(tile.height - 1);
        for y in y0..=y1 {
            for x in x0..=x1 {
                let e = spec.elevation_at(x as f64, y as f64);
                cells[y * tile.width + x] += e as f32;
            }
        }
    }
    let dem = DemRaster::new(
        tile.width,
        tile.height,
        tile.resolution_m,
        0.0,
        0.0,
        MOON_RADIUS_M,
        None,
        cells,
    )?;
    let ground_truth = specs
        .iter()
        .enumerate()
        .map(|(i, s)| s.ground_truth(&format!("c{i:03}"), theta_step_deg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SynthResult {
        dem,
        ground_truth,
        overlaps,
    })
}

/// Reads a JSON list of crater specs.
pub fn load_specs(text: &str) -> Result<Vec<SyntheticCraterSpec>, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn specs_to_json(specs: &[SyntheticCraterSpec]) -> String {
    serde_json::to_string_pretty(specs).expect("specs serialize")
}
