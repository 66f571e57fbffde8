//! Scored, binary-labeled records and the class-balance / error-rate vocabulary.
//!
//! A [`Dataset`] is immutable once built. Duplicate scores are kept as-is; tie
//! semantics belong to the ROC code, not to ingestion.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Group name used when the input has no group column.
pub const IMPLICIT_GROUP: &str = "all";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("input file not found: {path}")]
    MissingFile { path: String },
    #[error("failed to read {path}: {message}")]
    Io { path: String, message: String },
    #[error("input file {path} has no data rows")]
    EmptyFile { path: String },
    #[error("column '{column}' not found in header")]
    MissingColumn { column: String },
    #[error("row {row}, column '{column}': cannot parse score '{value}'")]
    ScoreParse {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: score {value} is not finite")]
    NonFiniteScore { row: usize, value: f64 },
    #[error("row {row}, column '{column}': unknown label token '{token}'")]
    UnknownLabel {
        row: usize,
        column: String,
        token: String,
    },
    #[error("invalid error profile: {0}")]
    InvalidProfile(String),
}

impl DatasetError {
    pub fn kind(&self) -> &'static str {
        match self {
            DatasetError::MissingFile { .. } => "missing_file",
            DatasetError::Io { .. } => "io",
            DatasetError::EmptyFile { .. } => "empty_file",
            DatasetError::MissingColumn { .. } => "missing_column",
            DatasetError::ScoreParse { .. } => "score_parse",
            DatasetError::NonFiniteScore { .. } => "non_finite_score",
            DatasetError::UnknownLabel { .. } => "unknown_label",
            DatasetError::InvalidProfile(_) => "invalid_profile",
        }
    }
}

/// Binary outcome. `Yes` is the event the decision-maker wants to avoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Yes,
    No,
}

impl Label {
    pub fn is_yes(self) -> bool {
        matches!(self, Label::Yes)
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Yes => Label::No,
            Label::No => Label::Yes,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Yes => "yes",
            Label::No => "no",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub score: f64,
    pub label: Label,
    pub group: Option<String>,
}

impl Record {
    pub fn new(score: f64, label: Label) -> Self {
        Record {
            score,
            label,
            group: None,
        }
    }

    pub fn with_group(score: f64, label: Label, group: impl Into<String>) -> Self {
        Record {
            score,
            label,
            group: Some(group.into()),
        }
    }

    pub fn group_name(&self) -> &str {
        self.group.as_deref().unwrap_or(IMPLICIT_GROUP)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<Record>,
    n_yes: usize,
    n_no: usize,
}

impl Dataset {
    /// Builds a dataset, rejecting non-finite scores.
    pub fn new(records: Vec<Record>) -> Result<Self, DatasetError> {
        let mut n_yes = 0;
        for (i, r) in records.iter().enumerate() {
            if !r.score.is_finite() {
                return Err(DatasetError::NonFiniteScore {
                    row: i + 1,
                    value: r.score,
                });
            }
            if r.label.is_yes() {
                n_yes += 1;
            }
        }
        let n_no = records.len() - n_yes;
        Ok(Dataset {
            records,
            n_yes,
            n_no,
        })
    }

    pub fn from_scores<I>(pairs: I) -> Result<Self, DatasetError>
    where
        I: IntoIterator<Item = (f64, Label)>,
    {
        Self::new(
            pairs
                .into_iter()
                .map(|(score, label)| Record::new(score, label))
                .collect(),
        )
    }

    /// Builds a dataset from a rank-ordered label string such as `"---++|--+++"`,
    /// lowest score first. `+` is YES, `-` is NO, anything else is ignored.
    /// Scores are the 1-based ranks.
    pub fn from_rank_pattern(pattern: &str) -> Self {
        let labels: Vec<Label> = pattern
            .chars()
            .filter_map(|c| match c {
                '+' => Some(Label::Yes),
                '-' => Some(Label::No),
                _ => None,
            })
            .collect();
        Self::from_scores(
            labels
                .into_iter()
                .enumerate()
                .map(|(i, l)| ((i + 1) as f64, l)),
        )
        .expect("rank scores are finite")
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn n_yes(&self) -> usize {
        self.n_yes
    }

    pub fn n_no(&self) -> usize {
        self.n_no
    }

    /// Class balance k = n_no / n, `None` for an empty dataset.
    pub fn class_balance(&self) -> Option<f64> {
        (!self.is_empty()).then(|| self.n_no as f64 / self.len() as f64)
    }

    /// YES scores (X) and NO scores (Y).
    pub fn split_scores(&self) -> (Vec<f64>, Vec<f64>) {
        let mut yes = Vec::with_capacity(self.n_yes);
        let mut no = Vec::with_capacity(self.n_no);
        for r in &self.records {
            match r.label {
                Label::Yes => yes.push(r.score),
                Label::No => no.push(r.score),
            }
        }
        (yes, no)
    }

    /// Same records with every score mapped through `f`.
    pub fn map_scores(&self, f: impl Fn(f64) -> f64) -> Result<Self, DatasetError> {
        Self::new(
            self.records
                .iter()
                .map(|r| Record {
                    score: f(r.score),
                    ..r.clone()
                })
                .collect(),
        )
    }

    /// Same records with YES and NO swapped.
    pub fn swap_labels(&self) -> Self {
        Dataset {
            records: self
                .records
                .iter()
                .map(|r| Record {
                    label: r.label.flipped(),
                    ..r.clone()
                })
                .collect(),
            n_yes: self.n_no,
            n_no: self.n_yes,
        }
    }

    /// Partition by group name, ordered by name.
    pub fn by_group(&self) -> BTreeMap<String, Dataset> {
        let mut parts: BTreeMap<String, Vec<Record>> = BTreeMap::new();
        for r in &self.records {
            parts
                .entry(r.group_name().to_string())
                .or_default()
                .push(r.clone());
        }
        parts
            .into_iter()
            .map(|(g, recs)| (g, Dataset::new(recs).expect("scores already validated")))
            .collect()
    }

    pub fn has_explicit_groups(&self) -> bool {
        self.records.iter().any(|r| r.group.is_some())
    }
}

/// Accepted label tokens; matching is case-insensitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVocabulary {
    pub yes: Vec<String>,
    pub no: Vec<String>,
}

impl Default for LabelVocabulary {
    fn default() -> Self {
        LabelVocabulary {
            yes: vec!["1".into(), "yes".into()],
            no: vec!["0".into(), "no".into()],
        }
    }
}

impl LabelVocabulary {
    pub fn parse(&self, token: &str) -> Option<Label> {
        let t = token.trim();
        if self.yes.iter().any(|y| y.eq_ignore_ascii_case(t)) {
            Some(Label::Yes)
        } else if self.no.iter().any(|n| n.eq_ignore_ascii_case(t)) {
            Some(Label::No)
        } else {
            None
        }
    }
}

/// Column-name mapping for CSV input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    pub score_col: String,
    pub label_col: String,
    pub group_col: Option<String>,
    pub vocabulary: LabelVocabulary,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            score_col: "score".into(),
            label_col: "label".into(),
            group_col: None,
            vocabulary: LabelVocabulary::default(),
        }
    }
}

fn open_csv(path: &Path) -> Result<csv::Reader<std::fs::File>, DatasetError> {
    let display = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => DatasetError::MissingFile {
            path: display.clone(),
        },
        _ => DatasetError::Io {
            path: display.clone(),
            message: e.to_string(),
        },
    })?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize, DatasetError> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| DatasetError::MissingColumn {
            column: name.to_string(),
        })
}

fn io_err(path: &Path, e: csv::Error) -> DatasetError {
    DatasetError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Loads a headered UTF-8 CSV. Row numbers in errors are 1-based data rows.
pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let mut reader = open_csv(path)?;
    let headers = reader.headers().map_err(|e| io_err(path, e))?.clone();
    if headers.is_empty() {
        return Err(DatasetError::EmptyFile {
            path: path.display().to_string(),
        });
    }
    let score_idx = column_index(&headers, &schema.score_col)?;
    let label_idx = column_index(&headers, &schema.label_col)?;
    let group_idx = schema
        .group_col
        .as_deref()
        .map(|g| column_index(&headers, g))
        .transpose()?;

    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| io_err(path, e))?;
        let raw_score = row.get(score_idx).unwrap_or("");
        let score: f64 = raw_score
            .parse()
            .map_err(|_| DatasetError::ScoreParse {
                row: row_no,
                column: schema.score_col.clone(),
                value: raw_score.to_string(),
            })?;
        if !score.is_finite() {
            return Err(DatasetError::NonFiniteScore {
                row: row_no,
                value: score,
            });
        }
        let raw_label = row.get(label_idx).unwrap_or("");
        let label =
            schema
                .vocabulary
                .parse(raw_label)
                .ok_or_else(|| DatasetError::UnknownLabel {
                    row: row_no,
                    column: schema.label_col.clone(),
                    token: raw_label.to_string(),
                })?;
        let group = group_idx.map(|g| row.get(g).unwrap_or("").to_string());
        records.push(Record {
            score,
            label,
            group,
        });
    }
    if records.is_empty() {
        return Err(DatasetError::EmptyFile {
            path: path.display().to_string(),
        });
    }
    Dataset::new(records)
}

/// Reads one column as raw strings (used for ordinal ground-truth risk levels).
pub fn load_csv_column(path: impl AsRef<Path>, column: &str) -> Result<Vec<String>, DatasetError> {
    let path = path.as_ref();
    let mut reader = open_csv(path)?;
    let headers = reader.headers().map_err(|e| io_err(path, e))?.clone();
    let idx = column_index(&headers, column)?;
    reader
        .records()
        .map(|row| {
            row.map(|r| r.get(idx).unwrap_or("").to_string())
                .map_err(|e| io_err(path, e))
        })
        .collect()
}

/// Writes records back out with `score,label[,group]` columns. Scores use the
/// shortest round-tripping representation, so reloading is lossless.
pub fn write_csv(d: &Dataset, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    let grouped = d.has_explicit_groups();
    let mut header = vec!["score", "label"];
    if grouped {
        header.push("group");
    }
    w.write_record(&header).map_err(|e| io_err(path, e))?;
    for r in d.records() {
        let score = format!("{:?}", r.score);
        let label = r.label.to_string();
        let mut row = vec![score, label];
        if grouped {
            row.push(r.group_name().to_string());
        }
        w.write_record(&row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| DatasetError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupCounts {
    pub group: String,
    pub n_yes: usize,
    pub n_no: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub n: usize,
    pub n_yes: usize,
    pub n_no: usize,
    /// `None` when the dataset is empty.
    pub class_balance: Option<f64>,
    pub score_min: Option<f64>,
    pub score_max: Option<f64>,
    pub groups: Vec<GroupCounts>,
}

pub fn summarize(d: &Dataset) -> DatasetSummary {
    let score_min = d.records().iter().map(|r| r.score).reduce(f64::min);
    let score_max = d.records().iter().map(|r| r.score).reduce(f64::max);
    let groups = d
        .by_group()
        .into_iter()
        .map(|(group, g)| GroupCounts {
            group,
            n_yes: g.n_yes(),
            n_no: g.n_no(),
        })
        .collect();
    DatasetSummary {
        n: d.len(),
        n_yes: d.n_yes(),
        n_no: d.n_no(),
        class_balance: d.class_balance(),
        score_min,
        score_max,
        groups,
    }
}

/// (n_yes, n_no, n_err): the parameters of the closed-form AUC distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ErrorProfile {
    pub n_yes: usize,
    pub n_no: usize,
    pub n_err: usize,
}

impl ErrorProfile {
    pub fn new(n_yes: usize, n_no: usize, n_err: usize) -> Result<Self, DatasetError> {
        if n_err > n_yes + n_no {
            return Err(DatasetError::InvalidProfile(format!(
                "n_err = {n_err} exceeds n = {}",
                n_yes + n_no
            )));
        }
        Ok(ErrorProfile { n_yes, n_no, n_err })
    }

    /// Discretizes (n, k, ε) with round-half-to-even:
    /// n_no = round(k·n), n_yes = n − n_no, n_err = round(ε·n).
    pub fn from_rates(n: usize, k: f64, eps: f64) -> Result<Self, DatasetError> {
        if !(0.0..=1.0).contains(&k) || !(0.0..=1.0).contains(&eps) {
            return Err(DatasetError::InvalidProfile(format!(
                "k = {k} and eps = {eps} must lie in [0, 1]"
            )));
        }
        let n_no = round_half_even(k * n as f64).min(n);
        let n_err = round_half_even(eps * n as f64).min(n);
        Self::new(n - n_no, n_no, n_err)
    }

    pub fn n(&self) -> usize {
        self.n_yes + self.n_no
    }

    /// ε = n_err / n.
    pub fn error_rate(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            self.n_err as f64 / self.n() as f64
        }
    }

    pub fn class_balance(&self) -> f64 {
        self.n_no as f64 / self.n() as f64
    }

    /// The closed-form mean is an average over every split of the errors into
    /// false negatives and false positives; it is only a realizable AUC mean
    /// when every split exists, i.e. n_err ≤ min(n_yes, n_no).
    pub fn within_closed_form_domain(&self) -> bool {
        self.n_err <= self.n_yes.min(self.n_no)
    }
}

/// Rounds a nonnegative real to the nearest integer, ties to even. Values within
/// 1e-9 of a half-integer count as ties, so `0.55 * 50.0` (27.500000000000004)
/// rounds like 27.5.
pub fn round_half_even(x: f64) -> usize {
    let snapped = (x * 1e9).round() / 1e9;
    snapped.round_ties_even().max(0.0) as usize
}
