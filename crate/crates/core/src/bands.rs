//! Multi-threshold risk bands and fit diagnostics.
//!
//! Bands follow `O_1: s < λ_1`, `O_j: λ_{j-1} <= s < λ_j`, `O_k: s >= λ_{k-1}`.
//! AUC only sees the ordering of scores; the band audit and calibration table
//! see their values, which is where a monotone distortion such as halving
//! every score shows up.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::format::{opt_sig12, sig12};

#[derive(Debug, Error, PartialEq)]
pub enum BandError {
    #[error("band thresholds must be finite and strictly increasing")]
    UnorderedThresholds,
    #[error("{labels} band labels given for {thresholds} thresholds (need thresholds + 1)")]
    LabelCount { thresholds: usize, labels: usize },
    #[error("truth column has {got} entries for {expected} records")]
    TruthLength { expected: usize, got: usize },
    #[error("truth column declares {levels} levels but there are {bands} bands")]
    TruthArity { levels: usize, bands: usize },
    #[error("record {row}: truth level {level} out of range (levels = {levels})")]
    TruthLevel {
        row: usize,
        level: usize,
        levels: usize,
    },
    #[error("record {row}: unknown truth level '{token}'")]
    UnknownTruthToken { row: usize, token: String },
    #[error("bin count must be at least 1")]
    ZeroBins,
    #[error("dataset is empty")]
    EmptyDataset,
}

impl BandError {
    pub fn kind(&self) -> &'static str {
        match self {
            BandError::UnorderedThresholds => "unordered_thresholds",
            BandError::LabelCount { .. } => "label_count",
            BandError::TruthLength { .. } => "truth_length",
            BandError::TruthArity { .. } => "truth_arity",
            BandError::TruthLevel { .. } => "truth_level",
            BandError::UnknownTruthToken { .. } => "unknown_truth_token",
            BandError::ZeroBins => "zero_bins",
            BandError::EmptyDataset => "empty_dataset",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    thresholds: Vec<f64>,
    labels: Vec<String>,
}

impl BandSpec {
    pub fn new(thresholds: Vec<f64>, labels: Vec<String>) -> Result<Self, BandError> {
        if thresholds.iter().any(|t| !t.is_finite()) || thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BandError::UnorderedThresholds);
        }
        if labels.len() != thresholds.len() + 1 {
            return Err(BandError::LabelCount {
                thresholds: thresholds.len(),
                labels: labels.len(),
            });
        }
        Ok(BandSpec { thresholds, labels })
    }

    /// Labels `band1`, `band2`, … (or `all` for a single band).
    pub fn with_default_labels(thresholds: Vec<f64>) -> Result<Self, BandError> {
        let labels = if thresholds.is_empty() {
            vec!["all".to_string()]
        } else {
            (1..=thresholds.len() + 1).map(|i| format!("band{i}")).collect()
        };
        Self::new(thresholds, labels)
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn band_count(&self) -> usize {
        self.labels.len()
    }

    /// Index of the band a score falls in.
    pub fn band_of(&self, score: f64) -> usize {
        self.thresholds.partition_point(|&t| t <= score)
    }

    /// Maps truth tokens onto band indices: a band label (case-insensitive) or
    /// a 0-based integer index.
    pub fn parse_truth(&self, tokens: &[String]) -> Result<Vec<usize>, BandError> {
        tokens
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let t = t.trim();
                self.labels
                    .iter()
                    .position(|l| l.eq_ignore_ascii_case(t))
                    .or_else(|| t.parse::<usize>().ok().filter(|&v| v < self.band_count()))
                    .ok_or_else(|| BandError::UnknownTruthToken {
                        row: i + 1,
                        token: t.to_string(),
                    })
            })
            .collect()
    }
}

/// Band index per record, in record order.
pub fn assign_bands(d: &Dataset, spec: &BandSpec) -> Vec<usize> {
    d.records().iter().map(|r| spec.band_of(r.score)).collect()
}

/// Ordinal ground-truth risk level per record (0 = lowest).
#[derive(Debug, Clone, PartialEq)]
pub struct TruthLevels {
    pub levels: usize,
    pub values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    pub band: String,
    pub count: usize,
    /// `None` for an empty band.
    pub yes_rate: Option<f64>,
    pub mean_score: Option<f64>,
    /// Records per truth level, present when truth was supplied.
    pub truth_counts: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandAudit {
    pub labels: Vec<String>,
    pub thresholds: Vec<f64>,
    pub bands: Vec<BandRow>,
    /// Row per assigned band, column per truth level.
    pub agreement: Option<Vec<Vec<usize>>>,
    pub warnings: Vec<String>,
}

impl BandAudit {
    /// Agreement mass off the diagonal.
    pub fn off_diagonal(&self) -> Option<usize> {
        self.agreement.as_ref().map(|m| {
            m.iter()
                .enumerate()
                .flat_map(|(i, row)| row.iter().enumerate().filter(move |(j, _)| *j != i))
                .map(|(_, c)| c)
                .sum()
        })
    }

    /// `band,count,yes_rate,mean_score[,truth_<label>…]`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = vec![
            "band".to_string(),
            "count".into(),
            "yes_rate".into(),
            "mean_score".into(),
        ];
        if self.agreement.is_some() {
            header.extend(self.labels.iter().map(|l| format!("truth_{l}")));
        }
        writeln!(w, "{}", header.join(","))?;
        for row in &self.bands {
            let mut cells = vec![
                row.band.clone(),
                row.count.to_string(),
                opt_sig12(row.yes_rate),
                opt_sig12(row.mean_score),
            ];
            if let Some(tc) = &row.truth_counts {
                cells.extend(tc.iter().map(|c| c.to_string()));
            }
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

pub fn band_audit(
    d: &Dataset,
    spec: &BandSpec,
    truth: Option<&TruthLevels>,
) -> Result<BandAudit, BandError> {
    let k = spec.band_count();
    if let Some(t) = truth {
        if t.levels != k {
            return Err(BandError::TruthArity {
                levels: t.levels,
                bands: k,
            });
        }
        if t.values.len() != d.len() {
            return Err(BandError::TruthLength {
                expected: d.len(),
                got: t.values.len(),
            });
        }
        if let Some((i, &v)) = t.values.iter().enumerate().find(|(_, &v)| v >= k) {
            return Err(BandError::TruthLevel {
                row: i + 1,
                level: v,
                levels: k,
            });
        }
    }
    let assigned = assign_bands(d, spec);
    let mut counts = vec![0usize; k];
    let mut yes = vec![0usize; k];
    let mut score_sum = vec![0.0f64; k];
    let mut matrix = vec![vec![0usize; k]; k];
    for (i, (r, &b)) in d.records().iter().zip(&assigned).enumerate() {
        counts[b] += 1;
        yes[b] += r.label.is_yes() as usize;
        score_sum[b] += r.score;
        if let Some(t) = truth {
            matrix[b][t.values[i]] += 1;
        }
    }
    let bands: Vec<BandRow> = (0..k)
        .map(|b| BandRow {
            band: spec.labels()[b].clone(),
            count: counts[b],
            yes_rate: (counts[b] > 0).then(|| yes[b] as f64 / counts[b] as f64),
            mean_score: (counts[b] > 0).then(|| score_sum[b] / counts[b] as f64),
            truth_counts: truth.map(|_| matrix[b].clone()),
        })
        .collect();

    let mut warnings = Vec::new();
    let rates: Vec<(usize, f64)> = bands
        .iter()
        .enumerate()
        .filter_map(|(i, b)| b.yes_rate.map(|r| (i, r)))
        .collect();
    for w in rates.windows(2) {
        if w[1].1 < w[0].1 {
            warnings.push(format!(
                "band inversion: YES rate in '{}' ({}) is below '{}' ({})",
                spec.labels()[w[1].0],
                sig12(w[1].1),
                spec.labels()[w[0].0],
                sig12(w[0].1)
            ));
        }
    }
    for b in bands.iter().filter(|b| b.count == 0) {
        warnings.push(format!("band '{}' is empty", b.band));
    }

    Ok(BandAudit {
        labels: spec.labels().to_vec(),
        thresholds: spec.thresholds().to_vec(),
        bands,
        agreement: truth.map(|_| matrix),
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binning {
    #[default]
    EqualWidth,
    /// Quantile bins; tied scores are never split across bins.
    EqualCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub low: f64,
    pub high: f64,
    pub count: usize,
    pub mean_predicted: Option<f64>,
    pub observed_yes_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub binning: Binning,
    pub bins: Vec<CalibrationBin>,
    /// Σ (count_b / n)·|mean_predicted_b − observed_b|.
    pub gap: f64,
}

impl CalibrationTable {
    /// `bin,low,high,count,mean_score,observed_yes_rate`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "bin,low,high,count,mean_score,observed_yes_rate")?;
        for (i, b) in self.bins.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                i + 1,
                sig12(b.low),
                sig12(b.high),
                b.count,
                opt_sig12(b.mean_predicted),
                opt_sig12(b.observed_yes_rate)
            )?;
        }
        Ok(())
    }
}

pub fn calibration_table(d: &Dataset, bin_count: usize) -> Result<CalibrationTable, BandError> {
    calibration_table_with(d, bin_count, Binning::EqualWidth)
}

pub fn calibration_table_with(
    d: &Dataset,
    bin_count: usize,
    binning: Binning,
) -> Result<CalibrationTable, BandError> {
    if bin_count == 0 {
        return Err(BandError::ZeroBins);
    }
    if d.is_empty() {
        return Err(BandError::EmptyDataset);
    }
    let mut pairs: Vec<(f64, bool)> = d.records().iter().map(|r| (r.score, r.label.is_yes())).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (min, max) = (pairs[0].0, pairs[pairs.len() - 1].0);
    let n = pairs.len();

    // member ranges into the sorted pairs, plus nominal edges
    let mut ranges: Vec<(usize, usize, f64, f64)> = Vec::with_capacity(bin_count);
    match binning {
        Binning::EqualWidth => {
            let width = (max - min) / bin_count as f64;
            let edge = |i: usize| if i == bin_count { max } else { min + width * i as f64 };
            let mut start = 0;
            for b in 0..bin_count {
                let end = if b + 1 == bin_count {
                    n
                } else if width == 0.0 {
                    // all scores equal: everything lands in the first bin
                    if b == 0 { n } else { start }
                } else {
                    let hi = edge(b + 1);
                    start + pairs[start..].partition_point(|p| p.0 < hi)
                };
                ranges.push((start, end, edge(b), edge(b + 1)));
                start = end;
            }
        }
        Binning::EqualCount => {
            let mut start = 0;
            for b in 0..bin_count {
                let mut end = ((b + 1) * n) / bin_count;
                end = end.max(start);
                while end > 0 && end < n && pairs[end].0 == pairs[end - 1].0 {
                    end += 1;
                }
                if b + 1 == bin_count {
                    end = n;
                }
                let low = if start < n { pairs[start].0 } else { max };
                let high = if end > start { pairs[end - 1].0 } else { low };
                ranges.push((start, end, low, high));
                start = end;
            }
        }
    }

    let mut gap = 0.0;
    let bins = ranges
        .into_iter()
        .map(|(s, e, low, high)| {
            let members = &pairs[s..e];
            let count = members.len();
            let (mean_predicted, observed) = if count == 0 {
                (None, None)
            } else {
                let mp = members.iter().map(|p| p.0).sum::<f64>() / count as f64;
                let obs = members.iter().filter(|p| p.1).count() as f64 / count as f64;
                gap += count as f64 / n as f64 * (mp - obs).abs();
                (Some(mp), Some(obs))
            };
            CalibrationBin {
                low,
                high,
                count,
                mean_predicted,
                observed_yes_rate: observed,
            }
        })
        .collect();
    Ok(CalibrationTable { binning, bins, gap })
}
