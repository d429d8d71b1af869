//! Detection evaluation against a ground-truth catalog: one-to-one
//! matching plus precision, recall, F1, and F2.

use serde::{Deserialize, Serialize};

use crate::postproc::Detection;
use crate::rim::CraterRecord;

/// Default center-distance tolerance as a fraction of the smaller radius.
pub const DEFAULT_DXY: f64 = 1.0;
/// Default radius tolerance as a fraction of the smaller radius.
pub const DEFAULT_DR: f64 = 0.25;

/// Precision/recall family; `None` marks a zero-denominator case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub f2: Option<f64>,
}

/// Computes the metric family from raw counts.
pub fn metrics(tp: usize, fp: usize, fn_: usize) -> Metrics {
    let precision = if tp + fp > 0 {
        Some(tp as f64 / (tp + fp) as f64)
    } else {
        None
    };
    let recall = if tp + fn_ > 0 {
        Some(tp as f64 / (tp + fn_) as f64)
    } else {
        None
    };
    let (f1, f2) = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => {
            let (f1, f2) = f_scores(p, r);
            (Some(f1), Some(f2))
        }
        _ => (None, None),
    };
    Metrics {
        precision,
        recall,
        f1,
        f2,
    }
}

/// F1 and F2 from precision and recall (any common scale: fractions in,
/// fractions out; percentages in, percentages out).
pub fn f_scores(p: f64, r: f64) -> (f64, f64) {
    let f1 = 2.0 * p * r / (p + r);
    let f2 = 5.0 * p * r / (4.0 * p + r);
    (f1, f2)
}

/// Match counts, derived metrics, and the matched (detection index,
/// ground-truth id) pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchReport {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub f2: Option<f64>,
    pub matched_pairs: Vec<(usize, String)>,
}

/// Matches detections to ground truth.
///
/// A detection `d` may match a ground-truth crater `g` when their center
/// distance is within `dxy · min(r_d, r_g)` and their radii differ by at
/// most `dr · min(r_d, r_g)`. Candidates are claimed greedily by ascending
/// center distance, one-to-one.
pub fn match_to_ground_truth(
    detections: &[Detection],
    ground_truth: &[CraterRecord],
    dxy: f64,
    dr: f64,
) -> MatchReport {
    assert!(dxy > 0.0 && dr > 0.0, "tolerances must be positive");
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, d) in detections.iter().enumerate() {
        for (j, g) in ground_truth.iter().enumerate() {
            let rmin = d.radius_px.min(g.radius_px);
            let dist = d.center.distance_to(g.center);
            if dist <= dxy * rmin && (d.radius_px - g.radius_px).abs() / rmin <= dr {
                candidates.push((dist, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut used_det = vec![false; detections.len()];
    let mut used_gt = vec![false; ground_truth.len()];
    let mut matched_pairs = Vec::new();
    for (_, i, j) in candidates {
        if !used_det[i] && !used_gt[j] {
            used_det[i] = true;
            used_gt[j] = true;
            matched_pairs.push((i, ground_truth[j].id.clone()));
        }
    }
    let tp = matched_pairs.len();
    let fp = detections.len() - tp;
    let fn_ = ground_truth.len() - tp;
    let m = metrics(tp, fp, fn_);
    MatchReport {
        tp,
        fp,
        fn_,
        precision: m.precision,
        recall: m.recall,
        f1: m.f1,
        f2: m.f2,
        matched_pairs,
    }
}

impl MatchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable table for the diagnostics channel.
    pub fn to_table(&self) -> String {
        let pct = |v: Option<f64>| match v {
            Some(v) => format!("{:.2}%", v * 100.0),
            None => "n/a".to_string(),
        };
        format!(
            "tp {:>6}  fp {:>6}  fn {:>6}\nprecision {:>8}  recall {:>8}\nF1 {:>8}  F2 {:>8}",
            self.tp,
            self.fp,
            self.fn_,
            pct(self.precision),
            pct(self.recall),
            pct(self.f1),
            pct(self.f2),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::PixelPoint;

    fn det(x: f64, y: f64, r: f64) -> Detection {
        Detection::new("t", PixelPoint::new(x, y), r, 0.9)
    }

    fn gt(id: &str, x: f64, y: f64, r: f64) -> CraterRecord {
        CraterRecord::new(id, PixelPoint::new(x, y), r)
    }

    fn truth_set() -> Vec<CraterRecord> {
        (0..12)
            .map(|i| {
                gt(
                    &format!("g{i}"),
                    60.0 + (i % 4) as f64 * 110.0,
                    60.0 + (i / 4) as f64 * 120.0,
                    12.0 + (i % 5) as f64 * 4.0,
                )
            })
            .collect()
    }

    #[test]
    fn exact_detections_match_all() {
        let truth = truth_set();
        let dets: Vec<Detection> = truth
            .iter()
            .map(|g| det(g.center.x, g.center.y, g.radius_px))
            .collect();
        let report = match_to_ground_truth(&dets, &truth, DEFAULT_DXY, DEFAULT_DR);
        assert_eq!(report.tp, truth.len());
        assert_eq!(report.fp, 0);
        assert_eq!(report.fn_, 0);
        assert_eq!(report.precision, Some(1.0));
        assert_eq!(report.recall, Some(1.0));
    }

    #[test]
    fn empty_detections() {
        let truth = truth_set();
        let report = match_to_ground_truth(&[], &truth, DEFAULT_DXY, DEFAULT_DR);
        assert_eq!(report.tp, 0);
        assert_eq!(report.fn_, truth.len());
        assert_eq!(report.precision, None);
        assert_eq!(report.recall, Some(0.0));
    }

    #[test]
    fn jittered_truth_still_matches_under_defaults() {
        // Centers jittered by 0.1r, radii by 5%: inside both tolerances.
        let truth = truth_set();
        let dets: Vec<Detection> = truth
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                det(
                    g.center.x + sign * 0.1 * g.radius_px / 2f64.sqrt(),
                    g.center.y + sign * 0.1 * g.radius_px / 2f64.sqrt(),
                    g.radius_px * (1.0 + sign * 0.05),
                )
            })
            .collect();
        let report = match_to_ground_truth(&dets, &truth, DEFAULT_DXY, DEFAULT_DR);
        assert_eq!(report.tp, truth.len());
    }

    #[test]
    fn matching_is_one_to_one() {
        let truth = vec![gt("g0", 100.0, 100.0, 20.0)];
        let dets = vec![det(100.0, 100.0, 20.0), det(101.0, 100.0, 20.0)];
        let report = match_to_ground_truth(&dets, &truth, DEFAULT_DXY, DEFAULT_DR);
        assert_eq!(report.tp, 1);
        assert_eq!(report.fp, 1);
        let gt_ids: Vec<&String> = report.matched_pairs.iter().map(|(_, g)| g).collect();
        assert_eq!(gt_ids.len(), 1);
    }

    #[test]
    fn counts_balance() {
        let truth = truth_set();
        let dets: Vec<Detection> = truth
            .iter()
            .take(8)
            .map(|g| det(g.center.x, g.center.y, g.radius_px))
            .chain((0..3).map(|i| det(400.0 + i as f64 * 30.0, 450.0, 8.0)))
            .collect();
        let report = match_to_ground_truth(&dets, &truth, DEFAULT_DXY, DEFAULT_DR);
        assert_eq!(report.tp + report.fn_, truth.len());
        assert_eq!(report.tp + report.fp, dets.len());
    }

    #[test]
    fn metrics_zero_denominators_are_missing() {
        let m = metrics(0, 0, 0);
        assert_eq!(m.precision, None);
        assert_eq!(m.recall, None);
        assert_eq!(m.f1, None);
        let m = metrics(0, 5, 0);
        assert_eq!(m.precision, Some(0.0));
        assert_eq!(m.recall, None);
    }

    #[test]
    fn f_scores_equal_when_p_equals_r() {
        for v in [0.1, 0.35, 0.5, 0.93] {
            let (f1, f2) = f_scores(v, v);
            assert!((f1 - v).abs() < 1e-12);
            assert!((f2 - v).abs() < 1e-12);
        }
    }

    #[test]
    fn f2_weights_recall_over_precision() {
        // F2 > F1 iff R > P, F2 < F1 iff R < P.
        let mut state = 0x5eedu64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            0.01 + 0.98 * ((state >> 11) as f64 / (1u64 << 53) as f64)
        };
        for _ in 0..500 {
            let p = next();
            let r = next();
            let (f1, f2) = f_scores(p, r);
            if r > p {
                assert!(f2 > f1, "p={p} r={r}");
            } else if r < p {
                assert!(f2 < f1, "p={p} r={r}");
            }
        }
    }

    /// Published table rows reproduce from their printed P/R at the table's
    /// two-decimal precision (within one printed ulp).
    #[test]
    fn f_scores_reproduce_reference_rows() {
        let rows: [(f64, f64, f64, f64); 13] = [
            (52.68, 95.82, 67.99, 82.33),
            (54.70, 95.48, 69.55, 83.09),
            (56.83, 94.08, 70.86, 83.18),
            (57.52, 93.70, 71.29, 83.23),
            (58.24, 93.45, 71.76, 83.37),
            (58.61, 92.94, 71.89, 83.19),
            (59.01, 92.69, 72.11, 83.19),
            (58.69, 91.93, 71.64, 82.57),
            (58.65, 92.81, 71.88, 83.13),
            (58.51, 93.11, 71.86, 83.26),
            (58.24, 93.45, 71.76, 83.37),
            (57.59, 93.62, 71.31, 83.21),
            (23.31, 94.12, 37.37, 58.56),
        ];
        for (p, r, f1_expect, f2_expect) in rows {
            let (f1, f2) = f_scores(p, r);
            let round2 = |v: f64| (v * 100.0).round() / 100.0;
            assert!(
                (round2(f1) - f1_expect).abs() <= 0.01 + 1e-9,
                "F1 {f1} vs {f1_expect} for P={p} R={r}"
            );
            assert!(
                (round2(f2) - f2_expect).abs() <= 0.01 + 1e-9,
                "F2 {f2} vs {f2_expect} for P={p} R={r}"
            );
        }
    }

    #[test]
    fn report_json_shape() {
        let truth = vec![gt("g0", 50.0, 50.0, 10.0)];
        let dets = vec![det(50.0, 50.0, 10.0)];
        let report = match_to_ground_truth(&dets, &truth, 1.0, 0.25);
        let json = report.to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["tp"], 1);
        assert_eq!(value["fn"], 0);
        assert_eq!(value["precision"], 1.0);
    }
}
