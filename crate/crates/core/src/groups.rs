//! Per-group AUC, error rates and the gaps between groups.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bands::calibration_table;
use crate::dataset::Dataset;
use crate::distribution::{AucEstimate, DistributionError};
use crate::exec::{map_slice, Execution};
use crate::format::{opt_sig12, sig12};
use crate::roc::{auc_rank, confusion_at};

/// Groups with fewer records of either class than this are flagged unreliable.
pub const RELIABILITY_MIN: usize = 10;
/// Bins used for the per-group calibration gap.
pub const GROUP_CALIBRATION_BINS: usize = 10;

pub const FAIRNESS_CAVEAT: &str = "Equal AUC across groups is not sufficient to claim the model is fair: \
AUC ignores the score values and the error rates at the threshold actually used. \
AUC validation on its own is insufficient.";

#[derive(Debug, Error, PartialEq)]
pub enum GroupError {
    #[error("at least one threshold is required")]
    NoThresholds,
    #[error("threshold {0} is not a number")]
    NanThreshold(f64),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
}

impl GroupError {
    pub fn kind(&self) -> &'static str {
        match self {
            GroupError::NoThresholds => "no_thresholds",
            GroupError::NanThreshold(_) => "nan_threshold",
            GroupError::Distribution(e) => e.kind(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupFlag {
    Ok,
    Unreliable,
    Uncomputable,
}

impl GroupFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupFlag::Ok => "ok",
            GroupFlag::Unreliable => "unreliable",
            GroupFlag::Uncomputable => "uncomputable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    #[serde(with = "crate::format::serde_f64")]
    pub threshold: f64,
    /// `None` when the group has no NO records.
    pub fpr: Option<f64>,
    /// `None` when the group has no YES records.
    pub fnr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupEntry {
    pub group: String,
    pub n_yes: usize,
    pub n_no: usize,
    pub estimate: Option<AucEstimate>,
    pub flag: GroupFlag,
    /// Why the AUC could not be computed.
    pub reason: Option<String>,
    pub calibration_gap: Option<f64>,
    pub rates: Vec<RatePair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AucGap {
    pub a: String,
    pub b: String,
    /// AUC(a) − AUC(b).
    pub difference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateGap {
    #[serde(with = "crate::format::serde_f64")]
    pub threshold: f64,
    /// Largest pairwise |FPR| difference among groups with NO records.
    pub max_fpr_gap: Option<f64>,
    pub max_fnr_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    /// Ordered by group name.
    pub groups: Vec<GroupEntry>,
    /// Whole-dataset AUC, reported alongside and never derived from the groups.
    pub pooled: Option<AucEstimate>,
    pub auc_gaps: Vec<AucGap>,
    pub max_auc_gap: Option<f64>,
    pub thresholds: Vec<f64>,
    pub rate_gaps: Vec<RateGap>,
    pub notices: Vec<String>,
    pub caveat: String,
}

impl GroupReport {
    pub fn group(&self, name: &str) -> Option<&GroupEntry> {
        self.groups.iter().find(|g| g.group == name)
    }

    pub fn computable(&self) -> impl Iterator<Item = &GroupEntry> {
        self.groups.iter().filter(|g| g.estimate.is_some())
    }

    /// `group,n_yes,n_no,auc,se,ci_low,ci_high,flag` then `fpr@λ,fnr@λ` per threshold.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header: Vec<String> = ["group", "n_yes", "n_no", "auc", "se", "ci_low", "ci_high", "flag"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        for t in &self.thresholds {
            header.push(format!("fpr@{}", sig12(*t)));
            header.push(format!("fnr@{}", sig12(*t)));
        }
        writeln!(w, "{}", header.join(","))?;
        for g in &self.groups {
            let e = g.estimate.as_ref();
            let mut cells = vec![
                csv_field(&g.group),
                g.n_yes.to_string(),
                g.n_no.to_string(),
                opt_sig12(e.map(|e| e.theta)),
                opt_sig12(e.map(|e| e.se)),
                opt_sig12(e.map(|e| e.ci_low)),
                opt_sig12(e.map(|e| e.ci_high)),
                g.flag.as_str().to_string(),
            ];
            for r in &g.rates {
                cells.push(opt_sig12(r.fpr));
                cells.push(opt_sig12(r.fnr));
            }
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn rates_for(d: &Dataset, thresholds: &[f64]) -> Vec<RatePair> {
    thresholds
        .iter()
        .map(|&t| {
            let c = confusion_at(d, t);
            RatePair {
                threshold: t,
                fpr: c.fpr(),
                fnr: c.fnr(),
            }
        })
        .collect()
}

fn entry_for(name: String, g: &Dataset, thresholds: &[f64], level: f64) -> GroupEntry {
    let (n_yes, n_no) = (g.n_yes(), g.n_no());
    let (estimate, flag, reason) = match auc_rank(g) {
        Ok(r) => {
            let est = AucEstimate::for_observed(r.auc, n_yes, n_no, level)
                .expect("level validated and AUC in [0, 1]");
            let flag = if n_yes < RELIABILITY_MIN || n_no < RELIABILITY_MIN {
                GroupFlag::Unreliable
            } else {
                GroupFlag::Ok
            };
            (Some(est), flag, None)
        }
        Err(e) => (None, GroupFlag::Uncomputable, Some(e.to_string())),
    };
    GroupEntry {
        group: name,
        n_yes,
        n_no,
        estimate,
        flag,
        reason,
        calibration_gap: calibration_table(g, GROUP_CALIBRATION_BINS).ok().map(|t| t.gap),
        rates: rates_for(g, thresholds),
    }
}

fn max_pairwise(values: impl Iterator<Item = f64> + Clone) -> Option<f64> {
    let lo = values.clone().reduce(f64::min)?;
    let hi = values.reduce(f64::max)?;
    Some(hi - lo)
}

/// Per-group AUC with confidence intervals, plus per-threshold FPR/FNR when
/// `thresholds` is nonempty.
pub fn group_report(
    d: &Dataset,
    thresholds: &[f64],
    level: f64,
    exec: Execution,
) -> Result<GroupReport, GroupError> {
    crate::distribution::z_for_level(level)?;
    if let Some(&t) = thresholds.iter().find(|t| t.is_nan()) {
        return Err(GroupError::NanThreshold(t));
    }
    let parts: Vec<(String, Dataset)> = d.by_group().into_iter().collect();
    let groups: Vec<GroupEntry> =
        map_slice(exec, &parts, |(name, g)| entry_for(name.clone(), g, thresholds, level));

    let pooled = auc_rank(d)
        .ok()
        .map(|r| AucEstimate::for_observed(r.auc, d.n_yes(), d.n_no(), level).expect("validated"));

    let computable: Vec<&GroupEntry> = groups.iter().filter(|g| g.estimate.is_some()).collect();
    let mut auc_gaps = Vec::new();
    for (i, a) in computable.iter().enumerate() {
        for b in &computable[i + 1..] {
            auc_gaps.push(AucGap {
                a: a.group.clone(),
                b: b.group.clone(),
                difference: a.estimate.unwrap().theta - b.estimate.unwrap().theta,
            });
        }
    }
    let max_auc_gap = auc_gaps.iter().map(|g| g.difference.abs()).reduce(f64::max);

    let rate_gaps = thresholds
        .iter()
        .enumerate()
        .map(|(j, &t)| RateGap {
            threshold: t,
            max_fpr_gap: max_pairwise(groups.iter().filter_map(move |g| g.rates[j].fpr)),
            max_fnr_gap: max_pairwise(groups.iter().filter_map(move |g| g.rates[j].fnr)),
        })
        .collect();

    let mut notices = Vec::new();
    if computable.len() < 2 {
        notices.push(format!(
            "only {} group(s) have both classes; no between-group AUC comparison is possible",
            computable.len()
        ));
    }
    for g in groups.iter().filter(|g| g.flag == GroupFlag::Uncomputable) {
        notices.push(format!(
            "group '{}' is uncomputable: {}",
            g.group,
            g.reason.as_deref().unwrap_or("unknown")
        ));
    }
    for g in groups.iter().filter(|g| g.flag == GroupFlag::Unreliable) {
        notices.push(format!(
            "group '{}' has n_yes = {}, n_no = {} (below {RELIABILITY_MIN}); its AUC is unreliable",
            g.group, g.n_yes, g.n_no
        ));
    }
    if let Some(gap) = max_auc_gap {
        let cal: Vec<f64> = computable.iter().filter_map(|g| g.calibration_gap).collect();
        if let Some(spread) = max_pairwise(cal.iter().copied()) {
            if gap <= 0.01 && spread > 0.05 {
                notices.push(format!(
                    "group AUCs agree within {} but calibration gaps differ by {}; equal AUC hides a difference in fit",
                    sig12(gap),
                    sig12(spread)
                ));
            }
        }
    }

    Ok(GroupReport {
        groups,
        pooled,
        auc_gaps,
        max_auc_gap,
        thresholds: thresholds.to_vec(),
        rate_gaps,
        notices,
        caveat: FAIRNESS_CAVEAT.to_string(),
    })
}

/// AUC section only.
pub fn group_auc(d: &Dataset, level: f64) -> Result<GroupReport, GroupError> {
    group_report(d, &[], level, Execution::default())
}

/// Rates section at each threshold.
pub fn group_rates_at(d: &Dataset, thresholds: &[f64], level: f64) -> Result<GroupReport, GroupError> {
    if thresholds.is_empty() {
        return Err(GroupError::NoThresholds);
    }
    group_report(d, thresholds, level, Execution::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Label, Record};

    fn grouped(pattern: &str, group: &str) -> Vec<Record> {
        Dataset::from_rank_pattern(pattern)
            .records()
            .iter()
            .map(|r| Record::with_group(r.score, r.label, group))
            .collect()
    }

    #[test]
    fn pattern_groups() {
        let mut recs = grouped("---++|--+++", "G1");
        recs.extend(grouped("+----++++-", "G2"));
        let d = Dataset::new(recs).unwrap();
        let r = group_auc(&d, 0.95).unwrap();
        let a = r.group("G1").unwrap().estimate.unwrap().theta;
        let b = r.group("G2").unwrap().estimate.unwrap().theta;
        assert!((a - 0.84).abs() < 1e-12 && (b - 0.64).abs() < 1e-12);
        assert!((r.max_auc_gap.unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(r.caveat, FAIRNESS_CAVEAT);
        assert!(r.groups.iter().all(|g| g.flag == GroupFlag::Unreliable));
        assert!(r.pooled.is_some());
    }

    #[test]
    fn uncomputable_and_single_group() {
        let d = Dataset::new(vec![
            Record::with_group(0.1, Label::No, "a"),
            Record::with_group(0.9, Label::Yes, "a"),
            Record::with_group(0.5, Label::No, "b"),
        ])
        .unwrap();
        let r = group_auc(&d, 0.95).unwrap();
        assert_eq!(r.group("b").unwrap().flag, GroupFlag::Uncomputable);
        assert!(r.notices.iter().any(|n| n.starts_with("only 1 group")));
        assert!(r.notices.iter().any(|n| n.contains("'b' is uncomputable")));
        assert_eq!(r.max_auc_gap, None);
    }

    #[test]
    fn rate_gaps() {
        // G1 separated at 0.5, G2 all tied at 0.6
        let mut recs = vec![];
        for (s, l) in [(0.1, Label::No), (0.2, Label::No), (0.8, Label::Yes), (0.9, Label::Yes)] {
            recs.push(Record::with_group(s, l, "G1"));
        }
        for l in [Label::No, Label::No, Label::Yes, Label::Yes] {
            recs.push(Record::with_group(0.6, l, "G2"));
        }
        let d = Dataset::new(recs).unwrap();
        let r = group_rates_at(&d, &[0.5, -1.0], 0.95).unwrap();
        assert_eq!(r.rate_gaps[0].max_fpr_gap, Some(1.0));
        assert_eq!(r.rate_gaps[0].max_fnr_gap, Some(0.0));
        assert_eq!(r.rate_gaps[1].max_fpr_gap, Some(0.0));
        assert_eq!(r.group("G2").unwrap().rates[1].fpr, Some(1.0));
        assert_eq!(group_rates_at(&d, &[], 0.95), Err(GroupError::NoThresholds));

        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("group,n_yes,n_no,auc,se,ci_low,ci_high,flag,fpr@0.5,fnr@0.5,fpr@-1,fnr@-1\n"));
    }

    #[test]
    fn parallel_matches_sequential() {
        let recs: Vec<Record> = (0..400)
            .map(|i| {
                let l = if (i * 7) % 5 < 2 { Label::Yes } else { Label::No };
                Record::with_group((i % 37) as f64, l, format!("g{}", i % 6))
            })
            .collect();
        let d = Dataset::new(recs).unwrap();
        let a = group_report(&d, &[10.0], 0.95, Execution::Sequential).unwrap();
        let b = group_report(&d, &[10.0], 0.95, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let names: Vec<_> = a.groups.iter().map(|g| g.group.as_str()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }
}
