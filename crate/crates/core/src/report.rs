//! The composite audit: every analysis over one input file, written as a JSON
//! report plus plot-ready CSVs.
//!
//! All outputs are computed in memory before anything touches the output
//! directory, so a failing audit leaves no partial files. Output bytes depend
//! only on the input file and the configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bands::{band_audit, calibration_table, BandAudit, BandSpec, CalibrationTable, TruthLevels};
use crate::dataset::{load_csv, load_csv_column, summarize, CsvSchema, Dataset, DatasetSummary, ErrorProfile};
use crate::distribution::{default_eps_values, expected_auc, expected_auc_table_with, expected_se, AucEstimate};
use crate::exec::Execution;
use crate::format::{fixed3, percent, sig12};
use crate::groups::{group_report, GroupReport, FAIRNESS_CAVEAT};
use crate::roc::{accuracy, auc_rank, auc_trapezoid, confusion_at, roc_curve, ConfusionCounts};
use crate::simulation::{simulate_auc_with, SimConfig};
use crate::threshold::{
    implied_cost_ratio, optimal_threshold, threshold_sweep, write_sweep_csv, CostSpec, ImpliedCostRatio,
    ThresholdReport,
};
use crate::AuditError;

/// Class balances outside this range trigger the imbalance caveat.
pub const BALANCED_RANGE: (f64, f64) = (0.35, 0.65);
pub const DEFAULT_TRIALS: usize = 2000;
pub const DEFAULT_CALIBRATION_BINS: usize = 10;

pub const OUTPUT_FILES: [&str; 6] = [
    "report.json",
    "roc.csv",
    "thresholds.csv",
    "bands.csv",
    "groups.csv",
    "calibration.csv",
];

#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfig {
    pub input: PathBuf,
    pub schema: CsvSchema,
    pub cost: CostSpec,
    /// `None` audits a single band.
    pub bands: Option<BandSpec>,
    /// Column of ordinal truth levels for the band agreement matrix.
    pub truth_col: Option<String>,
    /// Thresholds for confusion tables and group rates; empty means the
    /// cost-optimal threshold only.
    pub thresholds: Vec<f64>,
    pub level: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub trials: usize,
    pub calibration_bins: usize,
    pub execution: Execution,
}

impl AuditConfig {
    pub fn new(input: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        AuditConfig {
            input: input.into(),
            schema: CsvSchema::default(),
            cost: CostSpec::unit(),
            bands: None,
            truth_col: None,
            thresholds: Vec::new(),
            level: 0.95,
            out_dir: out_dir.into(),
            seed: 0,
            trials: DEFAULT_TRIALS,
            calibration_bins: DEFAULT_CALIBRATION_BINS,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: String,
    pub score_col: String,
    pub label_col: String,
    pub group_col: Option<String>,
    pub truth_col: Option<String>,
    pub cost: CostSpec,
    pub band_thresholds: Vec<f64>,
    pub band_labels: Vec<String>,
    pub level: f64,
    pub seed: u64,
    pub trials: usize,
    pub calibration_bins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledAuc {
    pub estimate: AucEstimate,
    pub auc_trapezoid: f64,
    pub rank_sum: f64,
    pub tie_pair_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditedThreshold {
    #[serde(with = "crate::format::serde_f64")]
    pub threshold: f64,
    pub confusion: ConfusionCounts,
    pub accuracy: f64,
    pub cost: f64,
    /// Present when the threshold is one of the dataset's candidate thresholds.
    pub implied_cost_ratio: Option<ImpliedCostRatio>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSection {
    pub cost: CostSpec,
    pub optimal: ThresholdReport,
    pub optimal_accuracy: f64,
    pub optimal_implied_cost_ratio: ImpliedCostRatio,
    pub audited: Vec<AuditedThreshold>,
}

/// One row of the expected-AUC table, for the report's own n and balance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedRow {
    pub n: usize,
    pub k: f64,
    pub eps: Vec<f64>,
    pub expected_auc: Vec<Option<f64>>,
}

/// Spread of AUC across rankings with the error count seen at the
/// cost-optimal threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationContext {
    pub profile: ErrorProfile,
    pub trials: usize,
    pub seed: u64,
    /// Closed-form mean; absent when the errors outnumber the smaller class.
    pub expected_auc: Option<f64>,
    pub simulated_mean: f64,
    pub simulated_sd: f64,
    pub simulated_q025: f64,
    pub simulated_q975: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Caveat {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub config: ConfigEcho,
    pub dataset: DatasetSummary,
    pub auc: PooledAuc,
    pub roc_points: usize,
    pub thresholds: ThresholdSection,
    pub bands: BandAudit,
    pub calibration: CalibrationTable,
    pub groups: GroupReport,
    pub imbalance_context: Option<ExpectedRow>,
    pub simulation: SimulationContext,
    pub caveats: Vec<Caveat>,
    pub files: Vec<String>,
}

impl AuditReport {
    pub fn caveat(&self, id: &str) -> Option<&Caveat> {
        self.caveats.iter().find(|c| c.id == id)
    }
}

fn expected_row(n: usize, class_balance: f64, exec: Execution) -> Result<ExpectedRow, AuditError> {
    // the expression is symmetric in the two classes; tabulate the majority side
    let majority = class_balance.max(1.0 - class_balance);
    let k = ((majority * 20.0).round() / 20.0).clamp(0.5, 0.95);
    let eps = default_eps_values();
    let table = expected_auc_table_with(n.max(2), &[k], &eps, exec)?;
    Ok(ExpectedRow {
        n: table.n,
        k,
        expected_auc: table.cells[0].iter().map(|c| c.displayed(false)).collect(),
        eps,
    })
}

fn build_caveats(
    k: f64,
    row: Option<&ExpectedRow>,
    auc: f64,
    optimal_accuracy: f64,
    optimal_threshold: f64,
    se: f64,
    level: f64,
) -> Vec<Caveat> {
    let mut caveats = Vec::new();
    if let Some(row) = row {
        let cells: Vec<String> = row
            .eps
            .iter()
            .zip(&row.expected_auc)
            .filter_map(|(e, v)| v.map(|v| format!("{} -> {}", percent(*e), fixed3(v))))
            .collect();
        caveats.push(Caveat {
            id: "class_imbalance".into(),
            text: format!(
                "Class balance k = {} lies outside [{}, {}]. Under imbalance the expected AUC of a \
                 classifier depends on the balance as well as the error rate, and observed AUC varies widely. \
                 Expected-AUC table row k = {:.2}, n = {} (error rate -> expected AUC): {}.",
                fixed3(k),
                BALANCED_RANGE.0,
                BALANCED_RANGE.1,
                row.k,
                row.n,
                cells.join(", ")
            ),
        });
    }
    caveats.push(Caveat {
        id: "auc_not_accuracy".into(),
        text: format!(
            "AUC summarizes ranking over all thresholds and is not the accuracy of any deployed threshold. \
             Here AUC = {} while accuracy at the cost-optimal threshold {} is {}.",
            fixed3(auc),
            sig12(optimal_threshold),
            fixed3(optimal_accuracy)
        ),
    });
    caveats.push(Caveat {
        id: "auc_uncertainty".into(),
        text: format!(
            "The standard error of this AUC is {}; values within {} of it are not distinguishable at the {} level.",
            fixed3(se),
            fixed3(2.0 * se),
            percent(level)
        ),
    });
    caveats.push(Caveat {
        id: "auc_parity_not_fairness".into(),
        text: FAIRNESS_CAVEAT.to_string(),
    });
    caveats
}

fn load_truth(cfg: &AuditConfig, spec: &BandSpec) -> Result<Option<TruthLevels>, AuditError> {
    let Some(col) = &cfg.truth_col else {
        return Ok(None);
    };
    let tokens = load_csv_column(&cfg.input, col)?;
    let values = spec.parse_truth(&tokens)?;
    Ok(Some(TruthLevels {
        levels: spec.band_count(),
        values,
    }))
}

/// Runs every analysis and returns the report with each output file's bytes.
pub fn build_audit(cfg: &AuditConfig) -> Result<(AuditReport, Vec<(String, Vec<u8>)>), AuditError> {
    let d: Dataset = load_csv(&cfg.input, &cfg.schema)?;
    let rank = auc_rank(&d)?;
    let curve = roc_curve(&d)?;
    let estimate = AucEstimate::for_observed(rank.auc, d.n_yes(), d.n_no(), cfg.level)?;

    let optimal = optimal_threshold(&d, &cfg.cost)?;
    let optimal_accuracy = accuracy(&optimal.confusion)?;
    let audited_points = if cfg.thresholds.is_empty() {
        vec![optimal.threshold]
    } else {
        cfg.thresholds.clone()
    };
    let audited = audited_points
        .iter()
        .map(|&t| {
            let c = confusion_at(&d, t);
            Ok(AuditedThreshold {
                threshold: t,
                accuracy: accuracy(&c)?,
                cost: cfg.cost.cost_of(&c),
                confusion: c,
                implied_cost_ratio: implied_cost_ratio(&d, t).ok(),
            })
        })
        .collect::<Result<Vec<_>, AuditError>>()?;
    let sweep = threshold_sweep(&d, &cfg.cost)?;

    let spec = match &cfg.bands {
        Some(s) => s.clone(),
        None => BandSpec::with_default_labels(vec![])?,
    };
    let truth = load_truth(cfg, &spec)?;
    let bands = band_audit(&d, &spec, truth.as_ref())?;
    let calibration = calibration_table(&d, cfg.calibration_bins)?;
    let groups = group_report(&d, &audited_points, cfg.level, cfg.execution)?;

    let k = d.class_balance().expect("dataset has both classes");
    let imbalance_context = if k < BALANCED_RANGE.0 || k > BALANCED_RANGE.1 {
        Some(expected_row(d.len(), k, cfg.execution)?)
    } else {
        None
    };

    let c = &optimal.confusion;
    let profile = ErrorProfile::new(d.n_yes(), d.n_no(), c.fp + c.fn_)?;
    let sim = simulate_auc_with(&SimConfig::new(profile, cfg.trials, cfg.seed), cfg.execution)?;
    let simulation = SimulationContext {
        profile,
        trials: cfg.trials,
        seed: cfg.seed,
        expected_auc: if profile.within_closed_form_domain() {
            Some(expected_auc(&profile)?)
        } else {
            None
        },
        simulated_mean: sim.mean,
        simulated_sd: sim.sd,
        simulated_q025: sim.q025,
        simulated_q975: sim.q975,
    };

    let se = expected_se(rank.auc, d.n_yes(), d.n_no())?;
    let caveats = build_caveats(
        k,
        imbalance_context.as_ref(),
        rank.auc,
        optimal_accuracy,
        optimal.threshold,
        se,
        cfg.level,
    );

    let report = AuditReport {
        config: ConfigEcho {
            input: cfg.input.display().to_string(),
            score_col: cfg.schema.score_col.clone(),
            label_col: cfg.schema.label_col.clone(),
            group_col: cfg.schema.group_col.clone(),
            truth_col: cfg.truth_col.clone(),
            cost: cfg.cost,
            band_thresholds: spec.thresholds().to_vec(),
            band_labels: spec.labels().to_vec(),
            level: cfg.level,
            seed: cfg.seed,
            trials: cfg.trials,
            calibration_bins: cfg.calibration_bins,
        },
        dataset: summarize(&d),
        auc: PooledAuc {
            estimate,
            auc_trapezoid: auc_trapezoid(&curve),
            rank_sum: rank.rank_sum,
            tie_pair_count: rank.tie_pair_count,
        },
        roc_points: curve.points.len(),
        thresholds: ThresholdSection {
            cost: cfg.cost,
            optimal_implied_cost_ratio: implied_cost_ratio(&d, optimal.threshold)?,
            optimal,
            optimal_accuracy,
            audited,
        },
        bands,
        calibration,
        groups,
        imbalance_context,
        simulation,
        caveats,
        files: OUTPUT_FILES.iter().map(|s| s.to_string()).collect(),
    };

    let mut files = Vec::new();
    let mut json = serde_json::to_vec_pretty(&report).map_err(|e| AuditError::Config(e.to_string()))?;
    json.push(b'\n');
    files.push(("report.json".to_string(), json));
    files.push(("roc.csv".to_string(), curve.to_csv_string().into_bytes()));
    let mut buf = Vec::new();
    write_sweep_csv(&sweep, &mut buf).expect("writing to a Vec cannot fail");
    files.push(("thresholds.csv".to_string(), buf));
    let mut buf = Vec::new();
    report.bands.write_csv(&mut buf).expect("writing to a Vec cannot fail");
    files.push(("bands.csv".to_string(), buf));
    let mut buf = Vec::new();
    report.groups.write_csv(&mut buf).expect("writing to a Vec cannot fail");
    files.push(("groups.csv".to_string(), buf));
    let mut buf = Vec::new();
    report.calibration.write_csv(&mut buf).expect("writing to a Vec cannot fail");
    files.push(("calibration.csv".to_string(), buf));
    Ok((report, files))
}

fn output_error(path: &Path, e: std::io::Error) -> AuditError {
    AuditError::Output {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Writes each file to a temporary name first, then renames them into place.
pub fn write_outputs(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<(), AuditError> {
    std::fs::create_dir_all(dir).map_err(|e| output_error(dir, e))?;
    let staged: Vec<(PathBuf, PathBuf)> = files
        .iter()
        .map(|(name, _)| (dir.join(format!(".{name}.tmp")), dir.join(name)))
        .collect();
    for ((tmp, _), (_, bytes)) in staged.iter().zip(files) {
        if let Err(e) = std::fs::write(tmp, bytes) {
            for (t, _) in &staged {
                let _ = std::fs::remove_file(t);
            }
            return Err(output_error(tmp, e));
        }
    }
    for (tmp, dest) in &staged {
        std::fs::rename(tmp, dest).map_err(|e| output_error(dest, e))?;
    }
    Ok(())
}

pub fn run_audit(cfg: &AuditConfig) -> Result<AuditReport, AuditError> {
    let (report, files) = build_audit(cfg)?;
    write_outputs(&cfg.out_dir, &files)?;
    Ok(report)
}

/// Writes the expected-AUC table for `n` to `path` (or returns it only, when
/// `path` is `None`).
pub fn emit_expected_table(
    n: usize,
    k_values: &[f64],
    eps_values: &[f64],
    keep_sub_random: bool,
    path: Option<&Path>,
) -> Result<String, AuditError> {
    let table = expected_auc_table_with(n, k_values, eps_values, Execution::default())?;
    let csv = table.to_csv_string(keep_sub_random);
    if let Some(p) = path {
        if let Some(parent) = p.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| output_error(parent, e))?;
        }
        std::fs::write(p, &csv).map_err(|e| output_error(p, e))?;
    }
    Ok(csv)
}
