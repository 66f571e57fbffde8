//! Cost-sensitive threshold analysis.
//!
//! Total cost at λ is `c_fn · FN_λ + c_fp · FP_λ`, with FN_λ = n_yes(1 − TPR_λ)
//! and FP_λ = n_no · FPR_λ. With unit costs this is the misclassification count.
//! A threshold is cost-optimal for some ratio c_fn / c_fp exactly when its ROC
//! point sits on the upper convex hull; hull work is done in integer
//! (FP, TP) coordinates so slopes are exact ratios of counts.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::format::sig12;
use crate::roc::{confusion_at, confusion_sweep, require_both_classes, ConfusionCounts, RocError};

#[derive(Debug, Error, PartialEq)]
pub enum ThresholdError {
    #[error("invalid cost specification: {0}")]
    InvalidCost(String),
    #[error("threshold {0} is not a candidate threshold (a distinct score or +inf)")]
    UnknownThreshold(f64),
    #[error(transparent)]
    Roc(#[from] RocError),
}

impl ThresholdError {
    pub fn kind(&self) -> &'static str {
        match self {
            ThresholdError::InvalidCost(_) => "invalid_cost",
            ThresholdError::UnknownThreshold(_) => "unknown_threshold",
            ThresholdError::Roc(e) => e.kind(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostSpec {
    pub c_fp: f64,
    pub c_fn: f64,
}

impl CostSpec {
    pub fn new(c_fp: f64, c_fn: f64) -> Result<Self, ThresholdError> {
        if !(c_fp.is_finite() && c_fn.is_finite()) || c_fp < 0.0 || c_fn < 0.0 {
            return Err(ThresholdError::InvalidCost(format!(
                "costs must be finite and nonnegative (c_fp = {c_fp}, c_fn = {c_fn})"
            )));
        }
        if c_fp == 0.0 && c_fn == 0.0 {
            return Err(ThresholdError::InvalidCost(
                "c_fp and c_fn cannot both be zero".into(),
            ));
        }
        Ok(CostSpec { c_fp, c_fn })
    }

    pub fn unit() -> Self {
        CostSpec { c_fp: 1.0, c_fn: 1.0 }
    }

    pub fn cost_of(&self, c: &ConfusionCounts) -> f64 {
        self.c_fn * c.fn_ as f64 + self.c_fp * c.fp as f64
    }
}

pub fn cost_at(d: &Dataset, threshold: f64, spec: &CostSpec) -> f64 {
    spec.cost_of(&confusion_at(d, threshold))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    #[serde(with = "crate::format::serde_f64")]
    pub threshold: f64,
    pub cost: f64,
    pub confusion: ConfusionCounts,
    pub is_optimal: bool,
}

/// Exhaustive search over candidate thresholds. Among equal-cost minimizers the
/// largest threshold (fewest predicted YES) wins.
pub fn optimal_threshold(d: &Dataset, spec: &CostSpec) -> Result<ThresholdReport, ThresholdError> {
    require_both_classes(d)?;
    let mut best: Option<(f64, ConfusionCounts)> = None;
    // sweep runs from the highest threshold down, so strict `<` keeps the largest
    for c in confusion_sweep(d) {
        let cost = spec.cost_of(&c);
        if best.is_none_or(|(b, _)| cost < b) {
            best = Some((cost, c));
        }
    }
    let (cost, confusion) = best.expect("sweep always has the sentinel");
    Ok(ThresholdReport {
        threshold: confusion.threshold,
        cost,
        confusion,
        is_optimal: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HullStatus {
    /// A corner of the upper hull: optimal over an interval of ratios.
    Vertex,
    /// Interior of a hull segment: optimal at a single ratio only.
    Edge,
    /// Strictly below the hull: never optimal.
    Dominated,
}

/// Closed interval of ratios c_fn / c_fp; `high` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioInterval {
    #[serde(with = "crate::format::serde_f64")]
    pub low: f64,
    #[serde(with = "crate::format::serde_f64")]
    pub high: f64,
}

impl RatioInterval {
    pub fn contains(&self, ratio: f64) -> bool {
        ratio >= self.low && ratio <= self.high
    }
}

/// Cost ratios c_fn / c_fp under which a threshold minimizes total cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpliedCostRatio {
    #[serde(with = "crate::format::serde_f64")]
    pub threshold: f64,
    pub status: HullStatus,
    /// `None` when the threshold is dominated.
    pub interval: Option<RatioInterval>,
}

impl ImpliedCostRatio {
    pub fn is_dominated(&self) -> bool {
        self.status == HullStatus::Dominated
    }

    pub fn contains(&self, ratio: f64) -> bool {
        self.interval.is_some_and(|i| i.contains(ratio))
    }
}

/// Point in integer (FP, TP) space.
type Pt = (i64, i64);

fn cross(o: Pt, a: Pt, b: Pt) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Indices of the upper-hull vertices of sweep points already ordered by
/// nondecreasing FP and TP. Collinear points are dropped.
fn upper_hull(points: &[Pt]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..points.len() {
        while hull.len() >= 2 {
            let (a, b) = (points[hull[hull.len() - 2]], points[hull[hull.len() - 1]]);
            // drop b unless a → b → p turns clockwise
            if cross(a, b, points[i]) >= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

#[derive(Debug, Clone)]
struct HullInfo {
    sweep: Vec<ConfusionCounts>,
    points: Vec<Pt>,
    hull: Vec<usize>,
}

impl HullInfo {
    fn new(d: &Dataset) -> Self {
        let sweep = confusion_sweep(d);
        let points: Vec<Pt> = sweep.iter().map(|c| (c.fp as i64, c.tp as i64)).collect();
        let hull = upper_hull(&points);
        HullInfo {
            sweep,
            points,
            hull,
        }
    }

    /// Δfp / Δtp between two sweep points: +inf for a horizontal step, 0 for vertical.
    fn ratio(a: Pt, b: Pt) -> f64 {
        let (dfp, dtp) = ((b.0 - a.0) as f64, (b.1 - a.1) as f64);
        if dtp == 0.0 {
            f64::INFINITY
        } else {
            dfp / dtp
        }
    }

    fn classify(&self, idx: usize) -> ImpliedCostRatio {
        let threshold = self.sweep[idx].threshold;
        let p = self.points[idx];
        let (status, interval) = if let Ok(pos) = self.hull.binary_search(&idx) {
            let low = match pos {
                0 => 0.0,
                _ => Self::ratio(self.points[self.hull[pos - 1]], p),
            };
            let high = match self.hull.get(pos + 1) {
                Some(&next) => Self::ratio(p, self.points[next]),
                None => f64::INFINITY,
            };
            (HullStatus::Vertex, Some(RatioInterval { low, high }))
        } else {
            let seg = self
                .hull
                .windows(2)
                .find(|w| w[0] < idx && idx < w[1])
                .expect("hull spans every sweep index");
            let (a, b) = (self.points[seg[0]], self.points[seg[1]]);
            if cross(a, b, p) == 0 {
                let r = Self::ratio(a, b);
                (HullStatus::Edge, Some(RatioInterval { low: r, high: r }))
            } else {
                (HullStatus::Dominated, None)
            }
        };
        ImpliedCostRatio {
            threshold,
            status,
            interval,
        }
    }

    fn index_of(&self, threshold: f64) -> Option<usize> {
        self.sweep.iter().position(|c| c.threshold == threshold)
    }
}

/// Interval of c_fn / c_fp ratios for which `threshold` is cost-optimal.
pub fn implied_cost_ratio(d: &Dataset, threshold: f64) -> Result<ImpliedCostRatio, ThresholdError> {
    require_both_classes(d)?;
    let info = HullInfo::new(d);
    let idx = info
        .index_of(threshold)
        .ok_or(ThresholdError::UnknownThreshold(threshold))?;
    Ok(info.classify(idx))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(with = "crate::format::serde_f64")]
    pub threshold: f64,
    pub fn_count: usize,
    pub fp_count: usize,
    pub cost: f64,
    pub on_hull: bool,
    pub accuracy: f64,
}

/// Every candidate threshold with its error counts, cost and hull membership,
/// highest threshold first.
pub fn threshold_sweep(d: &Dataset, spec: &CostSpec) -> Result<Vec<SweepRow>, ThresholdError> {
    require_both_classes(d)?;
    let info = HullInfo::new(d);
    Ok(info
        .sweep
        .iter()
        .enumerate()
        .map(|(i, c)| SweepRow {
            threshold: c.threshold,
            fn_count: c.fn_,
            fp_count: c.fp,
            cost: spec.cost_of(c),
            on_hull: !info.classify(i).is_dominated(),
            accuracy: (c.tp + c.tn) as f64 / c.total() as f64,
        })
        .collect())
}

/// `threshold,fn_count,fp_count,cost,on_hull,accuracy`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "threshold,fn_count,fp_count,cost,on_hull,accuracy")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            sig12(r.threshold),
            r.fn_count,
            r.fp_count,
            sig12(r.cost),
            r.on_hull as u8,
            sig12(r.accuracy)
        )?;
    }
    Ok(())
}
