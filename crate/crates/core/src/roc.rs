//! Confusion-matrix accounting, ROC curves, and empirical AUC.
//!
//! Threshold convention: a record is predicted YES when `score >= threshold`.
//! Ties use midranks in the rank statistic and diagonal segments on the curve,
//! which keeps the trapezoid and rank forms of AUC identical.

use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Dataset, Label};
use crate::format::sig12;

#[derive(Debug, Error, PartialEq)]
pub enum RocError {
    #[error("need both classes present (n_yes = {n_yes}, n_no = {n_no})")]
    DegenerateClass { n_yes: usize, n_no: usize },
    #[error("score list is empty")]
    EmptyInput,
    #[error("confusion matrix has no records")]
    EmptyConfusion,
}

impl RocError {
    pub fn kind(&self) -> &'static str {
        match self {
            RocError::DegenerateClass { .. } => "degenerate_class",
            RocError::EmptyInput => "empty_input",
            RocError::EmptyConfusion => "empty_confusion",
        }
    }
}

pub(crate) fn require_both_classes(d: &Dataset) -> Result<(), RocError> {
    if d.n_yes() == 0 || d.n_no() == 0 {
        Err(RocError::DegenerateClass {
            n_yes: d.n_yes(),
            n_no: d.n_no(),
        })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    #[serde(with = "crate::format::serde_f64")]
    pub threshold: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn errors(&self) -> usize {
        self.fp + self.fn_
    }

    /// `None` when there are no YES records.
    pub fn tpr(&self) -> Option<f64> {
        let p = self.tp + self.fn_;
        (p > 0).then(|| self.tp as f64 / p as f64)
    }

    /// `None` when there are no NO records.
    pub fn fpr(&self) -> Option<f64> {
        let n = self.fp + self.tn;
        (n > 0).then(|| self.fp as f64 / n as f64)
    }

    pub fn fnr(&self) -> Option<f64> {
        self.tpr().map(|t| 1.0 - t)
    }
}

pub fn confusion_at(d: &Dataset, threshold: f64) -> ConfusionCounts {
    let mut c = ConfusionCounts {
        threshold,
        tp: 0,
        fp: 0,
        fn_: 0,
        tn: 0,
    };
    for r in d.records() {
        let predicted_yes = r.score >= threshold;
        match (r.label, predicted_yes) {
            (Label::Yes, true) => c.tp += 1,
            (Label::Yes, false) => c.fn_ += 1,
            (Label::No, true) => c.fp += 1,
            (Label::No, false) => c.tn += 1,
        }
    }
    c
}

/// Fraction of records classified correctly.
pub fn accuracy(c: &ConfusionCounts) -> Result<f64, RocError> {
    let total = c.total();
    if total == 0 {
        return Err(RocError::EmptyConfusion);
    }
    Ok((c.tp + c.tn) as f64 / total as f64)
}

/// Distinct scores in descending order with the (yes, no) count at each.
pub(crate) fn tie_blocks(d: &Dataset) -> Vec<(f64, usize, usize)> {
    let mut pairs: Vec<(f64, Label)> = d.records().iter().map(|r| (r.score, r.label)).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut blocks: Vec<(f64, usize, usize)> = Vec::new();
    for (s, l) in pairs {
        match blocks.last_mut() {
            Some(last) if last.0 == s => {
                if l.is_yes() {
                    last.1 += 1
                } else {
                    last.2 += 1
                }
            }
            _ => blocks.push((s, l.is_yes() as usize, (!l.is_yes()) as usize)),
        }
    }
    blocks
}

/// Confusion counts at every candidate threshold, highest first: the sentinel
/// `+inf` (nothing predicted YES), then each distinct score.
pub fn confusion_sweep(d: &Dataset) -> Vec<ConfusionCounts> {
    let (n_yes, n_no) = (d.n_yes(), d.n_no());
    let mut out = vec![ConfusionCounts {
        threshold: f64::INFINITY,
        tp: 0,
        fp: 0,
        fn_: n_yes,
        tn: n_no,
    }];
    let (mut tp, mut fp) = (0, 0);
    for (s, y, n) in tie_blocks(d) {
        tp += y;
        fp += n;
        out.push(ConfusionCounts {
            threshold: s,
            tp,
            fp,
            fn_: n_yes - tp,
            tn: n_no - fp,
        });
    }
    out
}

/// Candidate thresholds: `+inf` followed by the distinct scores, descending.
pub fn candidate_thresholds(d: &Dataset) -> Vec<f64> {
    std::iter::once(f64::INFINITY)
        .chain(tie_blocks(d).into_iter().map(|b| b.0))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    #[serde(with = "crate::format::serde_f64")]
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    /// `fpr,tpr,threshold` with 12 significant digits; the `+inf` anchor renders as `inf`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "fpr,tpr,threshold")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{}",
                sig12(p.fpr),
                sig12(p.tpr),
                sig12(p.threshold)
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

/// One point per distinct score plus the `(0,0)` anchor; the lowest score
/// lands on `(1,1)`. A block of tied scores is a single diagonal step.
pub fn roc_curve(d: &Dataset) -> Result<RocCurve, RocError> {
    require_both_classes(d)?;
    let (n_yes, n_no) = (d.n_yes() as f64, d.n_no() as f64);
    let points = confusion_sweep(d)
        .into_iter()
        .map(|c| RocPoint {
            fpr: c.fp as f64 / n_no,
            tpr: c.tp as f64 / n_yes,
            threshold: c.threshold,
        })
        .collect();
    Ok(RocCurve { points })
}

pub fn auc_trapezoid(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankAucResult {
    pub auc: f64,
    /// Sum of the (mid)ranks of YES records, ranks ascending by score from 1.
    pub rank_sum: f64,
    /// Number of (YES, NO) pairs with equal scores.
    pub tie_pair_count: u64,
    pub n_yes: usize,
    pub n_no: usize,
}

/// Mann–Whitney form: AUC = (S − n_yes(n_yes+1)/2) / (n_yes·n_no).
pub fn auc_rank(d: &Dataset) -> Result<RankAucResult, RocError> {
    require_both_classes(d)?;
    let mut blocks = tie_blocks(d);
    blocks.reverse();
    let mut rank_sum = 0.0;
    let mut tie_pairs = 0u64;
    let mut below = 0usize;
    for (_, y, n) in blocks {
        let size = y + n;
        // ranks below+1 ..= below+size share the midrank
        let midrank = below as f64 + (size as f64 + 1.0) / 2.0;
        rank_sum += y as f64 * midrank;
        tie_pairs += (y * n) as u64;
        below += size;
    }
    let (ny, nn) = (d.n_yes() as f64, d.n_no() as f64);
    let auc = (rank_sum - ny * (ny + 1.0) / 2.0) / (ny * nn);
    Ok(RankAucResult {
        auc,
        rank_sum,
        tie_pair_count: tie_pairs,
        n_yes: d.n_yes(),
        n_no: d.n_no(),
    })
}

/// Exhaustive pairwise Pr[X > Y] + ½·Pr[X = Y] over YES scores `x` and NO scores `y`.
pub fn auc_probability(x: &[f64], y: &[f64]) -> Result<f64, RocError> {
    if x.is_empty() || y.is_empty() {
        return Err(RocError::EmptyInput);
    }
    let mut twice_wins: u64 = 0;
    for a in x {
        for b in y {
            twice_wins += match a.total_cmp(b) {
                Ordering::Greater => 2,
                Ordering::Equal => 1,
                Ordering::Less => 0,
            };
        }
    }
    Ok(twice_wins as f64 / (2.0 * x.len() as f64 * y.len() as f64))
}
