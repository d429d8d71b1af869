//! Binary morphology on slope rasters: the pipeline that turns a crater's
//! slope window into a mask of candidate rim pixels.
//!
//! Pipeline order: crop ±1.6r → Otsu binarization → small-object removal →
//! closing → thinning → opening. Foreground is 8-connected throughout.

use crate::raster::{BinaryMask, RasterError, SlopeRaster};
use crate::rim::CraterRecord;

/// Structuring element shapes. Radius-1 disk and cross coincide (the
/// 4-neighborhood plus center).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeShape {
    Square,
    Cross,
    Disk,
}

/// Symmetric structuring element of the given shape and radius (≥ 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuringElement {
    pub shape: SeShape,
    pub radius: u32,
}

impl StructuringElement {
    pub fn disk(radius: u32) -> Self {
        assert!(radius >= 1);
        Self {
            shape: SeShape::Disk,
            radius,
        }
    }

    pub fn square(radius: u32) -> Self {
        assert!(radius >= 1);
        Self {
            shape: SeShape::Square,
            radius,
        }
    }

    pub fn cross(radius: u32) -> Self {
        assert!(radius >= 1);
        Self {
            shape: SeShape::Cross,
            radius,
        }
    }

    fn offsets(&self) -> Vec<(isize, isize)> {
        let r = self.radius as isize;
        let mut out = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                let keep = match self.shape {
                    SeShape::Square => true,
                    SeShape::Cross => dx.abs() + dy.abs() <= r,
                    SeShape::Disk => dx * dx + dy * dy <= r * r,
                };
                if keep {
                    out.push((dx, dy));
                }
            }
        }
        out
    }
}

/// Tuning knobs for [`extract_rim_region`].
#[derive(Debug, Clone, Copy)]
pub struct MorphParams {
    /// Minimum connected-component area kept, in pixels². `None` selects the
    /// scale-aware default `max(8, round(0.05 · r))`.
    pub min_area: Option<usize>,
    pub closing_se: StructuringElement,
    pub opening_se: StructuringElement,
}

impl Default for MorphParams {
    fn default() -> Self {
        Self {
            min_area: None,
            closing_se: StructuringElement::disk(2),
            opening_se: StructuringElement::disk(1),
        }
    }
}

impl MorphParams {
    pub fn min_area_for_radius(&self, radius_px: f64) -> usize {
        self.min_area
            .unwrap_or_else(|| ((0.05 * radius_px).round() as usize).max(8))
    }
}

/// Binary rim-region mask plus its offset in the parent raster.
#[derive(Debug, Clone)]
pub struct RimRegionMask {
    pub mask: BinaryMask,
    /// Top-left of the cropped window in parent coordinates.
    pub offset: (usize, usize),
}

impl RimRegionMask {
    /// Foreground test at a parent-raster position: any of the four pixels
    /// bracketing the point. Nearest-pixel rounding alone steps over the
    /// diagonal links of a 1-px-wide skeleton (those centers sit √2/2 px
    /// off the ray), so the bracket is the narrowest test that cannot miss
    /// an 8-connected curve.
    pub fn foreground_at_parent(&self, x: f64, y: f64) -> bool {
        let mx = x - self.offset.0 as f64;
        let my = y - self.offset.1 as f64;
        for gy in [my.floor(), my.ceil()] {
            for gx in [mx.floor(), mx.ceil()] {
                if gx >= 0.0 && gy >= 0.0 && self.mask.get_checked(gx as isize, gy as isize) {
                    return true;
                }
            }
        }
        false
    }
}

/// Otsu binarization result.
#[derive(Debug, Clone)]
pub struct OtsuResult {
    /// Threshold value (upper edge of the last background bin); foreground
    /// is strictly above it.
    pub threshold: f64,
    pub mask: BinaryMask,
    /// Chosen histogram split index, `None` when degenerate.
    pub bin: Option<usize>,
    /// True when the window was constant (zero between-class variance);
    /// the mask is then all background.
    pub degenerate: bool,
}

pub const OTSU_BINS: usize = 256;

/// Otsu's threshold over a 256-bin histogram spanning `[min, max]` of the
/// window. `values` is row-major with the given width; `valid` (same layout,
/// optional) excludes pixels from both histogram and foreground.
pub fn otsu_threshold(
    values: &[f64],
    width: usize,
    height: usize,
    valid: Option<&[bool]>,
) -> OtsuResult {
    assert_eq!(values.len(), width * height);
    let is_valid = |i: usize| valid.map_or(true, |v| v[i]);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if is_valid(i) {
            min = min.min(v);
            max = max.max(v);
        }
    }
    let degenerate_result = |threshold: f64| OtsuResult {
        threshold,
        mask: BinaryMask::new(width, height),
        bin: None,
        degenerate: true,
    };
    if !min.is_finite() || !max.is_finite() || max <= min {
        return degenerate_result(if min.is_finite() { min } else { 0.0 });
    }

    let range = max - min;
    let bin_of = |v: f64| -> usize {
        (((v - min) / range * OTSU_BINS as f64) as usize).min(OTSU_BINS - 1)
    };
    let mut hist = [0u64; OTSU_BINS];
    for (i, &v) in values.iter().enumerate() {
        if is_valid(i) {
            hist[bin_of(v)] += 1;
        }
    }
    let total: f64 = hist.iter().sum::<u64>() as f64;
    let sum_total: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &h)| i as f64 * h as f64)
        .sum();

    let mut w0 = 0.0;
    let mut sum0 = 0.0;
    let mut best_var = -1.0;
    let mut best_bin: Option<usize> = None;
    for t in 0..OTSU_BINS - 1 {
        w0 += hist[t] as f64;
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let m0 = sum0 / w0;
        let m1 = (sum_total - sum0) / w1;
        let var = w0 * w1 * (m0 - m1) * (m0 - m1);
        if var > best_var {
            best_var = var;
            best_bin = Some(t);
        }
    }
    let Some(t) = best_bin else {
        return degenerate_result(min);
    };

    let threshold = min + (t + 1) as f64 * range / OTSU_BINS as f64;
    let mut mask = BinaryMask::new(width, height);
    for (i, &v) in values.iter().enumerate() {
        if is_valid(i) && bin_of(v) > t {
            mask.set(i % width, i / width, true);
        }
    }
    OtsuResult {
        threshold,
        mask,
        bin: Some(t),
        degenerate: false,
    }
}

const NEIGHBORS_8: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Labels 8-connected foreground components; returns (labels, areas) with
/// labels 1-based and 0 = background.
pub fn label_components(mask: &BinaryMask) -> (Vec<u32>, Vec<usize>) {
    let w = mask.width();
    let h = mask.height();
    let mut labels = vec![0u32; w * h];
    let mut areas = Vec::new();
    let mut stack = Vec::new();
    let mut next = 0u32;
    for start in 0..w * h {
        if !mask.bits()[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        let mut area = 0usize;
        labels[start] = next;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            area += 1;
            let (x, y) = ((idx % w) as isize, (idx / w) as isize);
            for (dx, dy) in NEIGHBORS_8 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                    continue;
                }
                let nidx = ny as usize * w + nx as usize;
                if mask.bits()[nidx] && labels[nidx] == 0 {
                    labels[nidx] = next;
                    stack.push(nidx);
                }
            }
        }
        areas.push(area);
    }
    (labels, areas)
}

/// Clears every 8-connected component with area strictly below `min_area`.
pub fn remove_small_objects(mask: &BinaryMask, min_area: usize) -> BinaryMask {
    assert!(min_area >= 1);
    let (labels, areas) = label_components(mask);
    let w = mask.width();
    let mut out = BinaryMask::new(w, mask.height());
    for (idx, &label) in labels.iter().enumerate() {
        if label != 0 && areas[(label - 1) as usize] >= min_area {
            out.set(idx % w, idx / w, true);
        }
    }
    out
}

pub fn dilate(mask: &BinaryMask, se: StructuringElement) -> BinaryMask {
    let offsets = se.offsets();
    let w = mask.width();
    let h = mask.height();
    let mut out = BinaryMask::new(w, h);
    for (idx, &fg) in mask.bits().iter().enumerate() {
        if !fg {
            continue;
        }
        let (x, y) = ((idx % w) as isize, (idx / w) as isize);
        for &(dx, dy) in &offsets {
            let (nx, ny) = (x + dx, y + dy);
            if nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h {
                out.set(nx as usize, ny as usize, true);
            }
        }
    }
    out
}

pub fn erode(mask: &BinaryMask, se: StructuringElement) -> BinaryMask {
    let offsets = se.offsets();
    let w = mask.width();
    let h = mask.height();
    let mut out = BinaryMask::new(w, h);
    for (idx, &fg) in mask.bits().iter().enumerate() {
        if !fg {
            continue;
        }
        let (x, y) = ((idx % w) as isize, (idx / w) as isize);
        let all = offsets
            .iter()
            .all(|&(dx, dy)| mask.get_checked(x + dx, y + dy));
        if all {
            out.set(x as usize, y as usize, true);
        }
    }
    out
}

/// Dilation followed by erosion: fills gaps, extensive.
///
/// Runs on a canvas padded by the element radius so image borders do not
/// clip the intermediate dilation; without the padding, closing is neither
/// extensive nor idempotent for foreground near the edge.
pub fn binary_closing(mask: &BinaryMask, se: StructuringElement) -> BinaryMask {
    let pad = se.radius as usize;
    let w = mask.width();
    let h = mask.height();
    let mut padded = BinaryMask::new(w + 2 * pad, h + 2 * pad);
    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) {
                padded.set(x + pad, y + pad, true);
            }
        }
    }
    let closed = erode(&dilate(&padded, se), se);
    let mut out = BinaryMask::new(w, h);
    for y in 0..h {
        for x in 0..w {
            if closed.get(x + pad, y + pad) {
                out.set(x, y, true);
            }
        }
    }
    out
}

/// Erosion followed by dilation: removes specks, anti-extensive.
pub fn binary_open(mask: &BinaryMask, se: StructuringElement) -> BinaryMask {
    dilate(&erode(mask, se), se)
}

/// Zhang–Suen iterative thinning to convergence. Output is a subset of the
/// input with each component reduced to a 1-px-wide, 8-connected skeleton.
pub fn thin(mask: &BinaryMask) -> BinaryMask {
    let w = mask.width();
    let mut cur = mask.clone();
    // Only live foreground pixels are scanned; row-major order is kept so
    // results are independent of any bookkeeping.
    let mut alive: Vec<usize> = (0..cur.bits().len()).filter(|&i| cur.bits()[i]).collect();
    let mut to_clear: Vec<usize> = Vec::new();
    loop {
        let mut changed = false;
        for sub in 0..2 {
            to_clear.clear();
            for &idx in &alive {
                let (x, y) = ((idx % w) as isize, (idx / w) as isize);
                if zhang_suen_removable(&cur, x, y, sub == 0) {
                    to_clear.push(idx);
                }
            }
            if !to_clear.is_empty() {
                changed = true;
                for &idx in &to_clear {
                    cur.set(idx % w, idx / w, false);
                }
                alive.retain(|&i| cur.bits()[i]);
            }
        }
        if !changed {
            return cur;
        }
    }
}

/// Zhang–Suen deletion test for one pixel. Neighbor order P2..P9 is
/// N, NE, E, SE, S, SW, W, NW with y growing downward.
pub fn zhang_suen_removable(mask: &BinaryMask, x: isize, y: isize, first_subpass: bool) -> bool {
    let p = [
        mask.get_checked(x, y - 1),     // P2
        mask.get_checked(x + 1, y - 1), // P3
        mask.get_checked(x + 1, y),     // P4
        mask.get_checked(x + 1, y + 1), // P5
        mask.get_checked(x, y + 1),     // P6
        mask.get_checked(x - 1, y + 1), // P7
        mask.get_checked(x - 1, y),     // P8
        mask.get_checked(x - 1, y - 1), // P9
    ];
    let b = p.iter().filter(|&&v| v).count();
    if !(2..=6).contains(&b) {
        return false;
    }
    let a = (0..8)
        .filter(|&i| !p[i] && p[(i + 1) % 8])
        .count();
    if a != 1 {
        return false;
    }
    let (p2, p4, p6, p8) = (p[0], p[2], p[4], p[6]);
    if first_subpass {
        !(p2 && p4 && p6) && !(p4 && p6 && p8)
    } else {
        !(p2 && p4 && p8) && !(p2 && p6 && p8)
    }
}

/// Per-step snapshots emitted by [`extract_rim_region_steps`].
pub type PipelineSteps = Vec<(&'static str, BinaryMask)>;

/// Runs the rim-region pipeline on the crater's ±1.6r slope window.
///
/// A constant window degenerates under Otsu and yields an empty mask. The
/// final opening can annihilate a 1-px skeleton outright; when it empties a
/// non-empty input the thinned mask is kept so the rim search still has a
/// gate to consult (an unconditionally empty mask would force circular
/// fallback on every azimuth).
pub fn extract_rim_region(
    slope: &SlopeRaster,
    crater: &CraterRecord,
    params: &MorphParams,
) -> Result<RimRegionMask, RasterError> {
    extract_rim_region_impl(slope, crater, params, None)
}

/// Same as [`extract_rim_region`] but records the intermediate mask after
/// every pipeline step, for debug dumps.
pub fn extract_rim_region_steps(
    slope: &SlopeRaster,
    crater: &CraterRecord,
    params: &MorphParams,
    steps: &mut PipelineSteps,
) -> Result<RimRegionMask, RasterError> {
    extract_rim_region_impl(slope, crater, params, Some(steps))
}

fn extract_rim_region_impl(
    slope: &SlopeRaster,
    crater: &CraterRecord,
    params: &MorphParams,
    mut steps: Option<&mut PipelineSteps>,
) -> Result<RimRegionMask, RasterError> {
    let (window, offset) = slope.crop_window(crater.center, 1.6 * crater.radius_px)?;
    let valid: Vec<bool> = (0..window.width() * window.height())
        .map(|i| !window.is_flagged(i % window.width(), i / window.width()))
        .collect();
    let mut record = |name: &'static str, mask: &BinaryMask| {
        if let Some(s) = steps.as_deref_mut() {
            s.push((name, mask.clone()));
        }
    };

    let otsu = otsu_threshold(
        window.values(),
        window.width(),
        window.height(),
        Some(&valid),
    );
    record("otsu", &otsu.mask);
    if otsu.degenerate {
        return Ok(RimRegionMask {
            mask: otsu.mask,
            offset,
        });
    }

    let min_area = params.min_area_for_radius(crater.radius_px);
    let cleaned = remove_small_objects(&otsu.mask, min_area);
    record("remove_small", &cleaned);

    let closed = binary_closing(&cleaned, params.closing_se);
    record("closing", &closed);

    let thinned = thin(&closed);
    record("thinning", &thinned);

    let opened = binary_open(&thinned, params.opening_se);
    record("opening", &opened);

    let mask = if opened.is_empty() && !thinned.is_empty() {
        thinned
    } else {
        opened
    };
    Ok(RimRegionMask { mask, offset })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_from(rows: &[&str]) -> BinaryMask {
        let h = rows.len();
        let w = rows[0].len();
        let mut m = BinaryMask::new(w, h);
        for (y, row) in rows.iter().enumerate() {
            for (x, c) in row.chars().enumerate() {
                if c == '#' {
                    m.set(x, y, true);
                }
            }
        }
        m
    }

    /// Independent component counter (4/8-conn BFS, written from scratch).
    fn count_components(mask: &BinaryMask) -> usize {
        let w = mask.width();
        let h = mask.height();
        let mut seen = vec![false; w * h];
        let mut count = 0;
        for i in 0..w * h {
            if !mask.bits()[i] || seen[i] {
                continue;
            }
            count += 1;
            let mut queue = vec![i];
            seen[i] = true;
            while let Some(idx) = queue.pop() {
                let (x, y) = ((idx % w) as isize, (idx / w) as isize);
                for dy in -1..=1isize {
                    for dx in -1..=1isize {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let (nx, ny) = (x + dx, y + dy);
                        if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                            continue;
                        }
                        let nidx = ny as usize * w + nx as usize;
                        if mask.bits()[nidx] && !seen[nidx] {
                            seen[nidx] = true;
                            queue.push(nidx);
                        }
                    }
                }
            }
        }
        count
    }

    fn lcg_mask(width: usize, height: usize, seed: u64, density: f64) -> BinaryMask {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let bits = (0..width * height).map(|_| next() < density).collect();
        BinaryMask::from_bits(width, height, bits)
    }

    #[test]
    fn otsu_perfect_bimodal() {
        let mut values = vec![0.0; 32];
        values[16..].iter_mut().for_each(|v| *v = 100.0);
        let res = otsu_threshold(&values, 8, 4, None);
        assert!(!res.degenerate);
        assert!(res.threshold > 0.0 && res.threshold < 100.0);
        assert_eq!(res.mask.count_foreground(), 16);
        for i in 16..32 {
            assert!(res.mask.get(i % 8, i / 8));
        }
    }

    #[test]
    fn otsu_constant_window_degenerate() {
        let values = vec![7.0; 25];
        let res = otsu_threshold(&values, 5, 5, None);
        assert!(res.degenerate);
        assert!(res.mask.is_empty());
    }

    #[test]
    fn otsu_matches_brute_force_argmax() {
        // Exhaustive oracle: recompute class sums from scratch per split.
        let mut state = 0xdeadbeefu64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _trial in 0..20 {
            let values: Vec<f64> = (0..64 * 64).map(|_| next() * 40.0 + (next() * 3.0).powi(3)).collect();
            let res = otsu_threshold(&values, 64, 64, None);
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let range = max - min;
            let mut hist = [0u64; OTSU_BINS];
            for &v in &values {
                let b = (((v - min) / range * OTSU_BINS as f64) as usize).min(OTSU_BINS - 1);
                hist[b] += 1;
            }
            let mut best = (-1.0, None::<usize>);
            for t in 0..OTSU_BINS - 1 {
                let mut w0 = 0.0;
                let mut s0 = 0.0;
                for b in 0..=t {
                    w0 += hist[b] as f64;
                    s0 += b as f64 * hist[b] as f64;
                }
                let mut w1 = 0.0;
                let mut s1 = 0.0;
                for b in t + 1..OTSU_BINS {
                    w1 += hist[b] as f64;
                    s1 += b as f64 * hist[b] as f64;
                }
                if w0 == 0.0 || w1 == 0.0 {
                    continue;
                }
                let var = w0 * w1 * (s0 / w0 - s1 / w1) * (s0 / w0 - s1 / w1);
                if var > best.0 {
                    best = (var, Some(t));
                }
            }
            assert_eq!(res.bin, best.1);
        }
    }

    #[test]
    fn remove_small_speck() {
        let mut mask = BinaryMask::new(8, 8);
        mask.set(3, 3, true);
        let out = remove_small_objects(&mask, 2);
        assert!(out.is_empty());
    }

    #[test]
    fn remove_small_keeps_area_at_threshold() {
        let mut mask = BinaryMask::new(8, 8);
        mask.set(2, 2, true);
        mask.set(3, 2, true);
        mask.set(4, 2, true);
        let out = remove_small_objects(&mask, 3);
        assert_eq!(out.count_foreground(), 3);
    }

    #[test]
    fn remove_small_matches_flood_fill_oracle() {
        let mask = lcg_mask(48, 48, 99, 0.35);
        let min_area = 5;
        let out = remove_small_objects(&mask, min_area);
        // Oracle: independent flood fill, keep components with area >= min.
        let w = mask.width();
        let h = mask.height();
        let mut seen = vec![false; w * h];
        let mut expect = BinaryMask::new(w, h);
        for i in 0..w * h {
            if !mask.bits()[i] || seen[i] {
                continue;
            }
            let mut members = vec![i];
            let mut queue = vec![i];
            seen[i] = true;
            while let Some(idx) = queue.pop() {
                let (x, y) = ((idx % w) as isize, (idx / w) as isize);
                for dy in -1..=1isize {
                    for dx in -1..=1isize {
                        let (nx, ny) = (x + dx, y + dy);
                        if (dx == 0 && dy == 0)
                            || nx < 0
                            || ny < 0
                            || nx as usize >= w
                            || ny as usize >= h
                        {
                            continue;
                        }
                        let nidx = ny as usize * w + nx as usize;
                        if mask.bits()[nidx] && !seen[nidx] {
                            seen[nidx] = true;
                            members.push(nidx);
                            queue.push(nidx);
                        }
                    }
                }
            }
            if members.len() >= min_area {
                for m in members {
                    expect.set(m % w, m / w, true);
                }
            }
        }
        assert_eq!(out, expect);
    }

    #[test]
    fn closing_leaves_solid_rectangle() {
        let mut mask = BinaryMask::new(20, 20);
        for y in 5..15 {
            for x in 4..16 {
                mask.set(x, y, true);
            }
        }
        let closed = binary_closing(&mask, StructuringElement::disk(2));
        assert_eq!(closed, mask);
    }

    #[test]
    fn closing_bridges_one_pixel_gaps() {
        // Thick square ring broken into two arcs by 1-px gaps cut through
        // the top and bottom edges.
        let mut mask = BinaryMask::new(25, 25);
        for i in 4..=20 {
            for t in 0..3 {
                mask.set(i, 4 + t, true);
                mask.set(i, 18 + t, true);
                mask.set(4 + t, i, true);
                mask.set(18 + t, i, true);
            }
        }
        for t in 0..3 {
            mask.set(12, 4 + t, false);
            mask.set(12, 18 + t, false);
        }
        assert_eq!(count_components(&mask), 2);
        let closed = binary_closing(&mask, StructuringElement::disk(2));
        assert!(closed.get(12, 5));
        assert!(closed.get(12, 19));
        assert_eq!(count_components(&closed), 1);
    }

    #[test]
    fn closing_empty_fixed_point() {
        let mask = BinaryMask::new(10, 10);
        assert!(binary_closing(&mask, StructuringElement::disk(2)).is_empty());
    }

    #[test]
    fn opening_removes_isolated_pixel() {
        let mut mask = BinaryMask::new(9, 9);
        mask.set(4, 4, true);
        assert!(binary_open(&mask, StructuringElement::disk(1)).is_empty());
    }

    #[test]
    fn opening_keeps_most_of_solid_disk() {
        let mut mask = BinaryMask::new(25, 25);
        for y in 0..25isize {
            for x in 0..25isize {
                if (x - 12) * (x - 12) + (y - 12) * (y - 12) <= 100 {
                    mask.set(x as usize, y as usize, true);
                }
            }
        }
        let before = mask.count_foreground() as f64;
        let opened = binary_open(&mask, StructuringElement::disk(2));
        let after = opened.count_foreground() as f64;
        assert!(after > before * 0.85, "area loss {}", 1.0 - after / before);
    }

    #[test]
    fn opening_closing_algebra_on_random_masks() {
        for seed in 0..12u64 {
            let mask = lcg_mask(32, 32, seed, 0.45);
            let se = StructuringElement::disk(1 + (seed % 2) as u32);
            let opened = binary_open(&mask, se);
            let closed = binary_closing(&mask, se);
            for i in 0..mask.bits().len() {
                assert!(!opened.bits()[i] || mask.bits()[i], "opening not anti-extensive");
                assert!(!mask.bits()[i] || closed.bits()[i], "closing not extensive");
            }
            assert_eq!(binary_open(&opened, se), opened, "opening not idempotent");
            assert_eq!(binary_closing(&closed, se), closed, "closing not idempotent");
        }
    }

    #[test]
    fn remove_small_idempotent_and_shrinking() {
        for seed in 20..26u64 {
            let mask = lcg_mask(32, 32, seed, 0.4);
            let once = remove_small_objects(&mask, 4);
            assert!(once.count_foreground() <= mask.count_foreground());
            assert_eq!(remove_small_objects(&once, 4), once);
        }
    }

    #[test]
    fn thin_leaves_one_pixel_line() {
        let mask = mask_from(&[
            "..........",
            "..######..",
            "..........",
        ]);
        assert_eq!(thin(&mask), mask);
    }

    #[test]
    fn thin_reduces_bar_to_skeleton() {
        let mut mask = BinaryMask::new(24, 7);
        for y in 2..5 {
            for x in 2..22 {
                mask.set(x, y, true);
            }
        }
        let out = thin(&mask);
        // Zhang–Suen retains 17 of the 20 columns here (verified against a
        // from-scratch reference implementation of the textbook algorithm).
        assert!(out.count_foreground() >= 17);
        // At most one foreground pixel per column in the bar interior.
        for x in 3..21 {
            let col: usize = (0..7).filter(|&y| out.get(x, y)).count();
            assert!(col <= 1, "column {x} has width {col}");
        }
        // Subset of the input.
        for i in 0..out.bits().len() {
            assert!(!out.bits()[i] || mask.bits()[i]);
        }
    }

    #[test]
    fn thin_empty_is_empty() {
        assert!(thin(&BinaryMask::new(6, 6)).is_empty());
    }

    #[test]
    fn thin_converges() {
        for seed in 30..36u64 {
            let mask = lcg_mask(40, 40, seed, 0.55);
            let out = thin(&mask);
            // No pixel still satisfies either subpass removal criterion.
            for y in 0..40isize {
                for x in 0..40isize {
                    if out.get_checked(x, y) {
                        assert!(!zhang_suen_removable(&out, x, y, true));
                        assert!(!zhang_suen_removable(&out, x, y, false));
                    }
                }
            }
        }
    }

    #[test]
    fn thin_preserves_component_count() {
        for seed in 40..46u64 {
            let mask = lcg_mask(32, 32, seed, 0.6);
            let out = thin(&mask);
            assert_eq!(count_components(&out), count_components(&mask));
        }
    }
}
