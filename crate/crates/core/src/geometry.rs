//! Planar geometry shared by morphometry and post-processing: shoelace
//! area/perimeter, convex hull, minimum-area bounding rectangle, disk IoU.

use crate::raster::PixelPoint;

/// Absolute shoelace area of a closed polygon (vertices in order).
pub fn polygon_area(points: &[PixelPoint]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..points.len() {
        let a = points[i];
        let b = points[(i + 1) % points.len()];
        twice += a.x * b.y - b.x * a.y;
    }
    twice.abs() / 2.0
}

/// Perimeter of the closed ring through `points`.
pub fn polygon_perimeter(points: &[PixelPoint]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    (0..points.len())
        .map(|i| points[i].distance_to(points[(i + 1) % points.len()]))
        .sum()
}

/// Area centroid of a polygon; falls back to the vertex mean when the
/// polygon is degenerate (near-zero area).
pub fn polygon_centroid(points: &[PixelPoint]) -> PixelPoint {
    let n = points.len();
    let mut twice_area = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let a = points[i];
        let b = points[(i + 1) % n];
        let cross = a.x * b.y - b.x * a.y;
        twice_area += cross;
        cx += (a.x + b.x) * cross;
        cy += (a.y + b.y) * cross;
    }
    if twice_area.abs() < 1e-12 {
        let inv = 1.0 / n as f64;
        return PixelPoint::new(
            points.iter().map(|p| p.x).sum::<f64>() * inv,
            points.iter().map(|p| p.y).sum::<f64>() * inv,
        );
    }
    let scale = 1.0 / (3.0 * twice_area);
    PixelPoint::new(cx * scale, cy * scale)
}

/// Even-odd point-in-polygon test.
pub fn point_in_polygon(p: PixelPoint, polygon: &[PixelPoint]) -> bool {
    let mut inside = false;
    let n = polygon.len();
    let mut j = n - 1;
    for i in 0..n {
        let (pi, pj) = (polygon[i], polygon[j]);
        if (pi.y > p.y) != (pj.y > p.y)
            && p.x < (pj.x - pi.x) * (p.y - pi.y) / (pj.y - pi.y) + pi.x
        {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn cross(o: PixelPoint, a: PixelPoint, b: PixelPoint) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Convex hull via Andrew's monotone chain, counter-clockwise, no
/// collinear points retained.
pub fn convex_hull(points: &[PixelPoint]) -> Vec<PixelPoint> {
    let mut pts: Vec<PixelPoint> = points.to_vec();
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    let n = pts.len();
    if n < 3 {
        return pts;
    }
    let mut hull: Vec<PixelPoint> = Vec::with_capacity(2 * n);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// A minimum-area bounding rectangle: `length ≥ width`, `angle_deg` is the
/// orientation of the length side versus the +x axis, in `[0, 180)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingRectangle {
    pub width: f64,
    pub length: f64,
    pub angle_deg: f64,
}

/// Minimum-area rectangle over the convex hull by the rotating-calipers
/// edge sweep (the optimum is aligned with some hull edge). Returns `None`
/// for degenerate (collinear or fewer than 3) point sets.
pub fn min_bounding_rectangle(points: &[PixelPoint]) -> Option<BoundingRectangle> {
    let hull = convex_hull(points);
    if hull.len() < 3 {
        return None;
    }
    let mut best: Option<(f64, BoundingRectangle)> = None;
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        let ex = b.x - a.x;
        let ey = b.y - a.y;
        let len = (ex * ex + ey * ey).sqrt();
        if len < 1e-12 {
            continue;
        }
        let (ux, uy) = (ex / len, ey / len);
        // Extents along the edge direction and its normal.
        let (mut umin, mut umax) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for &p in &hull {
            let u = p.x * ux + p.y * uy;
            let v = -p.x * uy + p.y * ux;
            umin = umin.min(u);
            umax = umax.max(u);
            vmin = vmin.min(v);
            vmax = vmax.max(v);
        }
        let du = umax - umin;
        let dv = vmax - vmin;
        let area = du * dv;
        if best.map_or(true, |(ba, _)| area < ba) {
            let (width, length, dir) = if du >= dv {
                (dv, du, (ux, uy))
            } else {
                (du, dv, (-uy, ux))
            };
            let mut angle = dir.1.atan2(dir.0).to_degrees();
            angle = angle.rem_euclid(180.0);
            if (angle - 180.0).abs() < 1e-9 {
                angle = 0.0;
            }
            best = Some((
                area,
                BoundingRectangle {
                    width,
                    length,
                    angle_deg: angle,
                },
            ));
        }
    }
    best.map(|(_, r)| r)
}

/// Intersection-over-union of two disks, in closed form.
pub fn disk_iou(c1: PixelPoint, r1: f64, c2: PixelPoint, r2: f64) -> f64 {
    let a1 = std::f64::consts::PI * r1 * r1;
    let a2 = std::f64::consts::PI * r2 * r2;
    let inter = disk_intersection_area(c1, r1, c2, r2);
    let union = a1 + a2 - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Area of the intersection of two disks.
pub fn disk_intersection_area(c1: PixelPoint, r1: f64, c2: PixelPoint, r2: f64) -> f64 {
    let d = c1.distance_to(c2);
    if d >= r1 + r2 {
        return 0.0;
    }
    let rmin = r1.min(r2);
    if d <= (r1 - r2).abs() {
        return std::f64::consts::PI * rmin * rmin;
    }
    let cos1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0);
    let cos2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0);
    let seg1 = r1 * r1 * cos1.acos();
    let seg2 = r2 * r2 * cos2.acos();
    let kite = 0.5
        * ((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2))
            .max(0.0)
            .sqrt();
    seg1 + seg2 - kite
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(side: f64) -> Vec<PixelPoint> {
        vec![
            PixelPoint::new(0.0, 0.0),
            PixelPoint::new(side, 0.0),
            PixelPoint::new(side, side),
            PixelPoint::new(0.0, side),
        ]
    }

    #[test]
    fn shoelace_unit_square() {
        let sq = square(1.0);
        assert!((polygon_area(&sq) - 1.0).abs() < 1e-12);
        assert!((polygon_perimeter(&sq) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn area_orientation_independent() {
        let mut sq = square(2.0);
        sq.reverse();
        assert!((polygon_area(&sq) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn centroid_of_square() {
        let c = polygon_centroid(&square(2.0));
        assert!((c.x - 1.0).abs() < 1e-12 && (c.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hull_strips_interior_points() {
        let mut pts = square(4.0);
        pts.push(PixelPoint::new(2.0, 2.0));
        pts.push(PixelPoint::new(1.0, 3.0));
        let hull = convex_hull(&pts);
        assert_eq!(hull.len(), 4);
    }

    #[test]
    fn mbr_axis_aligned_rect() {
        // 5 wide, 3 tall: length side lies along x.
        let pts = vec![
            PixelPoint::new(0.0, 0.0),
            PixelPoint::new(5.0, 0.0),
            PixelPoint::new(5.0, 3.0),
            PixelPoint::new(0.0, 3.0),
        ];
        let r = min_bounding_rectangle(&pts).unwrap();
        assert!((r.width - 3.0).abs() < 1e-9);
        assert!((r.length - 5.0).abs() < 1e-9);
        assert!(r.angle_deg.min(180.0 - r.angle_deg) < 1e-6);
    }

    #[test]
    fn mbr_rotation_equivariant() {
        let base = [
            PixelPoint::new(0.0, 0.0),
            PixelPoint::new(5.0, 0.0),
            PixelPoint::new(5.0, 3.0),
            PixelPoint::new(0.0, 3.0),
        ];
        let theta = 30f64.to_radians();
        let rotated: Vec<PixelPoint> = base
            .iter()
            .map(|p| {
                PixelPoint::new(
                    p.x * theta.cos() - p.y * theta.sin(),
                    p.x * theta.sin() + p.y * theta.cos(),
                )
            })
            .collect();
        let r = min_bounding_rectangle(&rotated).unwrap();
        assert!((r.width - 3.0).abs() < 1e-9);
        assert!((r.length - 5.0).abs() < 1e-9);
        assert!((r.angle_deg - 30.0).abs() < 0.5);
    }

    #[test]
    fn mbr_degenerate_collinear() {
        let pts = vec![
            PixelPoint::new(0.0, 0.0),
            PixelPoint::new(1.0, 1.0),
            PixelPoint::new(2.0, 2.0),
        ];
        assert!(min_bounding_rectangle(&pts).is_none());
    }

    #[test]
    fn disk_iou_identical_and_disjoint() {
        let c = PixelPoint::new(0.0, 0.0);
        assert!((disk_iou(c, 10.0, c, 10.0) - 1.0).abs() < 1e-12);
        let far = PixelPoint::new(100.0, 0.0);
        assert_eq!(disk_iou(c, 10.0, far, 10.0), 0.0);
    }

    #[test]
    fn disk_iou_contained() {
        let c = PixelPoint::new(0.0, 0.0);
        // r=5 inside r=10: intersection = small disk, union = big disk.
        let got = disk_iou(c, 5.0, PixelPoint::new(1.0, 0.0), 10.0);
        assert!((got - 0.25).abs() < 1e-12);
    }

    #[test]
    fn disk_intersection_matches_quadrature() {
        // Monte-Carlo-free oracle: grid quadrature over the bounding box.
        let c1 = PixelPoint::new(0.0, 0.0);
        let c2 = PixelPoint::new(6.0, 2.0);
        let (r1, r2) = (5.0, 4.0);
        let step = 0.01;
        let mut count = 0u64;
        let mut total = 0u64;
        let (x0, x1) = (-5.0, 10.0);
        let (y0, y1) = (-5.0, 7.0);
        let nx = ((x1 - x0) / step) as usize;
        let ny = ((y1 - y0) / step) as usize;
        for iy in 0..ny {
            for ix in 0..nx {
                let p = PixelPoint::new(x0 + (ix as f64 + 0.5) * step, y0 + (iy as f64 + 0.5) * step);
                total += 1;
                if p.distance_to(c1) <= r1 && p.distance_to(c2) <= r2 {
                    count += 1;
                }
            }
        }
        let _ = total;
        let approx = count as f64 * step * step;
        let exact = disk_intersection_area(c1, r1, c2, r2);
        assert!(
            (approx - exact).abs() < 0.05,
            "quadrature {approx} vs closed form {exact}"
        );
    }

    #[test]
    fn point_in_polygon_square() {
        let sq = square(4.0);
        assert!(point_in_polygon(PixelPoint::new(2.0, 2.0), &sq));
        assert!(!point_in_polygon(PixelPoint::new(5.0, 2.0), &sq));
    }
}
