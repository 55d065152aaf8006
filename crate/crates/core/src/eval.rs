//! False positives per image and miss rate.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::pixel::Rect;
use crate::{Error, Result};

/// Criterion deciding whether a detection covers a labelled box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchRule {
    /// Intersection strictly larger than half the labelled area.
    #[default]
    Paper,
    /// Intersection over union strictly larger than one half.
    Iou,
}

impl MatchRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            MatchRule::Paper => "paper",
            MatchRule::Iou => "iou",
        }
    }
}

impl fmt::Display for MatchRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatchRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(MatchRule::Paper),
            "iou" => Ok(MatchRule::Iou),
            other => Err(Error::Config(format!("unknown match rule {other:?}"))),
        }
    }
}

/// Integer-exact match test.
pub fn is_match(label: &Rect, det: &Rect, rule: MatchRule) -> bool {
    let inter = label.intersection_area(det);
    match rule {
        MatchRule::Paper => 2 * inter > label.area(),
        MatchRule::Iou => 2 * inter > label.area() + det.area() - inter,
    }
}

/// A scored detection rectangle as consumed by the evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredRect {
    pub rect: Rect,
    pub score: f64,
}

/// Index-based outcome of matching one image.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchResult {
    /// `(label index, detection index)` pairs.
    pub matches: Vec<(usize, usize)>,
    pub false_positives: Vec<usize>,
    pub missed: Vec<usize>,
}

/// Greedy one-to-one assignment. Detections are taken in descending score
/// (input order on ties); each claims the unclaimed matching label with the
/// largest intersection (lowest index on ties).
pub fn match_one_image(labels: &[Rect], detections: &[ScoredRect], rule: MatchRule) -> MatchResult {
    let mut order: Vec<usize> = (0..detections.len()).collect();
    order.sort_by(|&a, &b| detections[b].score.total_cmp(&detections[a].score).then(a.cmp(&b)));
    let mut claimed = vec![false; labels.len()];
    let mut out = MatchResult::default();
    for di in order {
        let det = &detections[di].rect;
        let mut best: Option<(usize, u64)> = None;
        for (li, label) in labels.iter().enumerate() {
            if claimed[li] || !is_match(label, det, rule) {
                continue;
            }
            let inter = label.intersection_area(det);
            if best.map_or(true, |(_, b)| inter > b) {
                best = Some((li, inter));
            }
        }
        match best {
            Some((li, _)) => {
                claimed[li] = true;
                out.matches.push((li, di));
            }
            None => out.false_positives.push(di),
        }
    }
    out.missed = (0..labels.len()).filter(|&i| !claimed[i]).collect();
    out.false_positives.sort_unstable();
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rule: MatchRule,
    pub n_images: usize,
    pub total_fp: usize,
    pub total_missed: usize,
    pub total_labels: usize,
    pub match_count: usize,
    /// False positives per image, averaged over the corpus.
    pub avg_fppi: f64,
    /// Missed labels over total labels; zero for a label-free corpus.
    pub miss_rate: f64,
    pub avg_time_ms: f64,
}

/// One annotated image of an evaluation corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledImage {
    pub image_id: String,
    pub labels: Vec<Rect>,
}

/// Aggregates per-image matching. `detections` is keyed by image id; images
/// without an entry had no detections. `timings_ms` holds per-image detection
/// time and may be empty.
pub fn evaluate(
    dataset: &[LabeledImage],
    detections: &BTreeMap<String, Vec<ScoredRect>>,
    timings_ms: &[f64],
    rule: MatchRule,
) -> Result<EvalReport> {
    let ids: BTreeMap<&str, &LabeledImage> = dataset.iter().map(|l| (l.image_id.as_str(), l)).collect();
    if let Some(unknown) = detections.keys().find(|k| !ids.contains_key(k.as_str())) {
        return Err(Error::UnknownImage(unknown.clone()));
    }
    let (mut fp, mut missed, mut labels, mut matched) = (0, 0, 0, 0);
    for img in dataset {
        let dets = detections.get(&img.image_id).map(Vec::as_slice).unwrap_or(&[]);
        let m = match_one_image(&img.labels, dets, rule);
        fp += m.false_positives.len();
        missed += m.missed.len();
        matched += m.matches.len();
        labels += img.labels.len();
    }
    let n = dataset.len();
    Ok(EvalReport {
        rule,
        n_images: n,
        total_fp: fp,
        total_missed: missed,
        total_labels: labels,
        match_count: matched,
        avg_fppi: if n == 0 { 0.0 } else { fp as f64 / n as f64 },
        miss_rate: if labels == 0 {
            0.0
        } else {
            missed as f64 / labels as f64
        },
        avg_time_ms: if timings_ms.is_empty() {
            0.0
        } else {
            timings_ms.iter().sum::<f64>() / timings_ms.len() as f64
        },
    })
}

/// `(average time, match count)`: one point of the speed-versus-quality plot.
pub fn speed_quality_point(report: &EvalReport) -> (f64, usize) {
    (report.avg_time_ms, report.match_count)
}

pub const REPORT_HEADER: &str = "model,rule,n_images,avg_fppi,miss_rate,match_count,avg_time_ms";
pub const SERIES_HEADER: &str = "model,avg_time_ms,match_count";

pub fn report_csv_row(model: &str, r: &EvalReport) -> String {
    format!(
        "{},{},{},{:.6},{:.6},{},{:.3}",
        model, r.rule, r.n_images, r.avg_fppi, r.miss_rate, r.match_count, r.avg_time_ms
    )
}

/// Report CSV with header, one row per `(model name, report)`.
pub fn report_csv(rows: &[(String, EvalReport)]) -> String {
    let mut s = String::from(REPORT_HEADER);
    s.push('\n');
    for (model, r) in rows {
        let _ = writeln!(s, "{}", report_csv_row(model, r));
    }
    s
}

/// Speed-quality series CSV, one point per model/config.
pub fn series_csv(rows: &[(String, EvalReport)]) -> String {
    let mut s = String::from(SERIES_HEADER);
    s.push('\n');
    for (model, r) in rows {
        let (t, m) = speed_quality_point(r);
        let _ = writeln!(s, "{model},{t:.3},{m}");
    }
    s
}
