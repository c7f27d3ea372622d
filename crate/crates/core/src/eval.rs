//! Region and boundary precision/recall against human ground truth.
//!
//! Region scores follow the objects-and-parts scheme: for a predicted region
//! `s` and a ground-truth region `g` overlapping in `n` pixels, let
//! `a = n / |s|` and `b = n / |g|`.
//!
//! * object match when `a >= γo` and `b >= γo`: both regions earn credit 1;
//! * `s` is a part of `g` when `a >= γo` and `γp <= b < γo`: `s` earns `b`;
//! * `g` is a part of `s` when `b >= γo` and `γp <= a < γo`: `g` earns `a`.
//!
//! Each region keeps its best credit over all pairs. Precision is the summed
//! credit of predicted regions over their count, recall the same over
//! ground-truth regions, both pooled over annotators.
//!
//! Boundary scores match predicted cracks to ground-truth cracks one-to-one,
//! greedily by distance, within a tolerance proportional to the image
//! diagonal. A predicted crack counts as matched when it matches for any
//! annotator; recall pools matched ground-truth cracks over annotators.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::agglomerate::Hierarchy;
use crate::error::{Error, Result};
use crate::hierarchy::{cut, CrackMap, UcmLevels};
use crate::labels::{connected_components, LabelMap};

/// Default boundary matching tolerance as a fraction of the image diagonal.
pub const DEFAULT_FB_TOLERANCE: f64 = 0.0075;

/// One or more annotator partitions of the same image.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    annotators: Vec<LabelMap>,
}

impl GroundTruth {
    pub fn new(annotators: Vec<LabelMap>) -> Result<Self> {
        let first = annotators
            .first()
            .ok_or_else(|| Error::InvalidLabels("ground truth needs at least one annotator".into()))?;
        for other in &annotators[1..] {
            check_dims(first.width(), first.height(), other.width(), other.height())?;
        }
        Ok(GroundTruth { annotators })
    }

    pub fn annotators(&self) -> &[LabelMap] {
        &self.annotators
    }

    pub fn width(&self) -> usize {
        self.annotators[0].width()
    }

    pub fn height(&self) -> usize {
        self.annotators[0].height()
    }
}

fn check_dims(w1: usize, h1: usize, w2: usize, h2: usize) -> Result<()> {
    if (w1, h1) != (w2, h2) {
        return Err(Error::DimensionMismatch {
            left_width: w1,
            left_height: h1,
            right_width: w2,
            right_height: h2,
        });
    }
    Ok(())
}

/// Precision/recall at one threshold, with the pooled sums behind them so
/// that points from several images can be aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PRPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
    pub precision_hits: f64,
    pub precision_total: f64,
    pub recall_hits: f64,
    pub recall_total: f64,
}

impl PRPoint {
    pub fn from_counts(
        threshold: f64,
        precision_hits: f64,
        precision_total: f64,
        recall_hits: f64,
        recall_total: f64,
    ) -> Self {
        let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
        let precision = ratio(precision_hits, precision_total);
        let recall = ratio(recall_hits, recall_total);
        PRPoint {
            threshold,
            precision,
            recall,
            f: f_measure(precision, recall),
            precision_hits,
            precision_total,
            recall_hits,
            recall_total,
        }
    }
}

/// Harmonic mean, 0 when both inputs are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// `n` evenly spaced thresholds covering `[0, 1]`.
pub fn threshold_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FopParams {
    pub gamma_object: f64,
    pub gamma_part: f64,
}

impl Default for FopParams {
    fn default() -> Self {
        FopParams {
            gamma_object: 0.95,
            gamma_part: 0.25,
        }
    }
}

impl FopParams {
    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 < self.gamma_part && self.gamma_part <= self.gamma_object && self.gamma_object <= 1.0;
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "overlap thresholds need 0 < part <= object <= 1, got part {} and object {}",
                self.gamma_part, self.gamma_object
            )));
        }
        Ok(())
    }
}

/// Anything that yields a partition per threshold.
pub trait ThresholdPartition {
    fn dims(&self) -> (usize, usize);
    fn partition(&self, t: f64) -> LabelMap;
}

impl ThresholdPartition for CrackMap {
    fn dims(&self) -> (usize, usize) {
        (self.width(), self.height())
    }

    fn partition(&self, t: f64) -> LabelMap {
        self.regions(t)
    }
}

/// A hierarchy together with its levels, partitioned by [`cut`].
pub struct HierarchyCut<'a> {
    pub hierarchy: &'a Hierarchy,
    pub levels: &'a UcmLevels,
}

impl ThresholdPartition for HierarchyCut<'_> {
    fn dims(&self) -> (usize, usize) {
        (self.hierarchy.graph.width(), self.hierarchy.graph.height())
    }

    fn partition(&self, t: f64) -> LabelMap {
        cut(self.hierarchy, self.levels, t)
    }
}

/// A flat partition is the same at every threshold.
impl ThresholdPartition for LabelMap {
    fn dims(&self) -> (usize, usize) {
        (self.width(), self.height())
    }

    fn partition(&self, _t: f64) -> LabelMap {
        self.clone()
    }
}

/// Summed credits `(predicted, ground truth)` of one partition pair.
pub fn fop_credits(pred: &LabelMap, gt: &LabelMap, params: &FopParams) -> (f64, f64) {
    let ns = pred.region_count();
    let ng = gt.region_count();
    let mut keys: Vec<u64> = pred
        .labels()
        .iter()
        .zip(gt.labels())
        .map(|(&s, &g)| u64::from(s) * ng as u64 + u64::from(g))
        .collect();
    keys.sort_unstable();
    let size_s = pred.areas();
    let size_g = gt.areas();
    let mut credit_s = vec![0.0f64; ns];
    let mut credit_g = vec![0.0f64; ng];
    let (go, gp) = (params.gamma_object, params.gamma_part);
    for run in keys.chunk_by(|a, b| a == b) {
        let (s, g) = ((run[0] / ng as u64) as usize, (run[0] % ng as u64) as usize);
        let n = run.len() as f64;
        let a = n / size_s[s] as f64;
        let b = n / size_g[g] as f64;
        if a >= go && b >= go {
            credit_s[s] = credit_s[s].max(1.0);
            credit_g[g] = credit_g[g].max(1.0);
        } else if a >= go && b >= gp {
            credit_s[s] = credit_s[s].max(b);
        } else if b >= go && a >= gp {
            credit_g[g] = credit_g[g].max(a);
        }
    }
    (credit_s.iter().sum(), credit_g.iter().sum())
}

/// Objects-and-parts precision/recall of one partition against all
/// annotators.
pub fn fop_point(pred: &LabelMap, gt: &GroundTruth, threshold: f64, params: &FopParams) -> Result<PRPoint> {
    params.validate()?;
    check_dims(pred.width(), pred.height(), gt.width(), gt.height())?;
    let (mut ph, mut pt, mut rh, mut rt) = (0.0, 0.0, 0.0, 0.0);
    for annot in gt.annotators() {
        let (cs, cg) = fop_credits(pred, annot, params);
        ph += cs;
        pt += pred.region_count() as f64;
        rh += cg;
        rt += annot.region_count() as f64;
    }
    Ok(PRPoint::from_counts(threshold, ph, pt, rh, rt))
}

pub fn fop_curve(
    pred: &impl ThresholdPartition,
    gt: &GroundTruth,
    thresholds: &[f64],
    params: &FopParams,
) -> Result<Vec<PRPoint>> {
    let (w, h) = pred.dims();
    check_dims(w, h, gt.width(), gt.height())?;
    thresholds
        .iter()
        .map(|&t| fop_point(&pred.partition(t), gt, t, params))
        .collect()
}

/// Spatial hash over boundary points for radius queries.
struct PointGrid {
    cell: i64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl PointGrid {
    fn new(points: &[(u32, u32)], radius: f64) -> Self {
        let cell = (radius.ceil() as i64).max(1);
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, &(x, y)) in points.iter().enumerate() {
            cells
                .entry((i64::from(x) / cell, i64::from(y) / cell))
                .or_default()
                .push(i);
        }
        PointGrid { cell, cells }
    }

    fn near(&self, (x, y): (u32, u32)) -> impl Iterator<Item = usize> + '_ {
        let (cx, cy) = (i64::from(x) / self.cell, i64::from(y) / self.cell);
        (cy - 1..=cy + 1)
            .flat_map(move |j| (cx - 1..=cx + 1).map(move |i| (i, j)))
            .filter_map(|k| self.cells.get(&k))
            .flatten()
            .copied()
    }
}

/// Greedy one-to-one matching within `radius`, closest pairs first, ties
/// broken by position so that swapping the two sides swaps the result.
/// Returns matched flags for `a` and `b`.
pub fn match_points(a: &[(u32, u32)], b: &[(u32, u32)], radius: f64) -> (Vec<bool>, Vec<bool>) {
    let grid = PointGrid::new(b, radius);
    let r2 = radius * radius;
    let mut pairs: Vec<(u64, (u32, u32), (u32, u32), usize, usize)> = Vec::new();
    for (i, &p) in a.iter().enumerate() {
        for j in grid.near(p) {
            let q = b[j];
            let dx = i64::from(p.0) - i64::from(q.0);
            let dy = i64::from(p.1) - i64::from(q.1);
            let d2 = (dx * dx + dy * dy) as u64;
            if d2 as f64 <= r2 {
                let (lo, hi) = if (p.1, p.0) <= (q.1, q.0) { (p, q) } else { (q, p) };
                pairs.push((d2, (lo.1, lo.0), (hi.1, hi.0), i, j));
            }
        }
    }
    pairs.sort_unstable_by_key(|&(d2, lo, hi, _, _)| (d2, lo, hi));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    for (_, _, _, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
        }
    }
    (used_a, used_b)
}

/// Boundary precision/recall of the cracks above each threshold.
pub fn fb_curve(ucm: &CrackMap, gt: &GroundTruth, thresholds: &[f64], tol_frac: f64) -> Result<Vec<PRPoint>> {
    check_dims(ucm.width(), ucm.height(), gt.width(), gt.height())?;
    if !(tol_frac >= 0.0 && tol_frac.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "boundary tolerance must be >= 0, got {tol_frac}"
        )));
    }
    let (w, h) = (ucm.width() as f64, ucm.height() as f64);
    // crack coordinates are doubled
    let radius = 2.0 * tol_frac * (w * w + h * h).sqrt();
    let gt_points: Vec<Vec<(u32, u32)>> = gt
        .annotators()
        .iter()
        .map(|a| CrackMap::from_labels(a, 1.0).boundary_points(0.5))
        .collect();
    let recall_total: usize = gt_points.iter().map(Vec::len).sum();
    Ok(thresholds
        .iter()
        .map(|&t| {
            let pred = ucm.boundary_points(t);
            let mut any = vec![false; pred.len()];
            let mut recall_hits = 0usize;
            for g in &gt_points {
                let (mp, mg) = match_points(&pred, g, radius);
                for (flag, m) in any.iter_mut().zip(mp) {
                    *flag |= m;
                }
                recall_hits += mg.iter().filter(|&&m| m).count();
            }
            let precision_hits = any.iter().filter(|&&m| m).count();
            PRPoint::from_counts(
                t,
                precision_hits as f64,
                pred.len() as f64,
                recall_hits as f64,
                recall_total as f64,
            )
        })
        .collect())
}

/// Dataset-level summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdsOis {
    /// Best pooled point over thresholds shared by all images.
    pub ods: PRPoint,
    /// Mean over images of each image's best F.
    pub ois: f64,
}

pub fn ods_ois(curves: &[Vec<PRPoint>]) -> Result<OdsOis> {
    let first = curves
        .first()
        .ok_or_else(|| Error::InvalidConfig("no curves to aggregate".into()))?;
    if first.is_empty() {
        return Err(Error::InvalidConfig("curves have no thresholds".into()));
    }
    for c in curves {
        let same = c.len() == first.len() && c.iter().zip(first).all(|(a, b)| a.threshold == b.threshold);
        if !same {
            return Err(Error::InvalidConfig("curves disagree on thresholds".into()));
        }
    }
    let mut ods: Option<PRPoint> = None;
    for i in 0..first.len() {
        let (mut ph, mut pt, mut rh, mut rt) = (0.0, 0.0, 0.0, 0.0);
        for c in curves {
            ph += c[i].precision_hits;
            pt += c[i].precision_total;
            rh += c[i].recall_hits;
            rt += c[i].recall_total;
        }
        let p = PRPoint::from_counts(first[i].threshold, ph, pt, rh, rt);
        if ods.is_none_or(|best| p.f > best.f) {
            ods = Some(p);
        }
    }
    let ois = curves
        .iter()
        .map(|c| c.iter().map(|p| p.f).fold(0.0, f64::max))
        .sum::<f64>()
        / curves.len() as f64;
    Ok(OdsOis {
        ods: ods.expect("at least one threshold"),
        ois,
    })
}

/// Splits every category into its 4-connected components, numbered in
/// raster order.
pub fn labels_to_instances(width: usize, height: usize, categories: &[u32]) -> LabelMap {
    connected_components(width, height, categories)
}

pub fn write_curve_csv(mut out: impl Write, curve: &[PRPoint]) -> std::io::Result<()> {
    writeln!(out, "threshold,precision,recall,f")?;
    for p in curve {
        writeln!(out, "{},{},{},{}", p.threshold, p.precision, p.recall, p.f)?;
    }
    Ok(())
}

/// Summary rows `measure,kind,threshold,precision,recall,f`.
pub fn write_summary_csv(mut out: impl Write, rows: &[(&str, OdsOis)]) -> std::io::Result<()> {
    writeln!(out, "measure,kind,threshold,precision,recall,f")?;
    for (name, s) in rows {
        let o = s.ods;
        writeln!(out, "{name},ODS,{},{},{},{}", o.threshold, o.precision, o.recall, o.f)?;
        writeln!(out, "{name},OIS,,,,{}", s.ois)?;
    }
    Ok(())
}
