//! ROC/AUC auditing: empirical ROC and AUC, the closed-form AUC distribution
//! under a fixed error rate and class balance, cost-sensitive thresholds,
//! risk bands, group disaggregation and a Monte Carlo check of the closed
//! forms.
//!
//! Conventions shared by every module: a record is predicted YES at threshold
//! λ when `score >= λ`; class balance is `k = n_no / n`; AUC counts tied
//! (YES, NO) pairs as one half.

pub mod bands;
pub mod dataset;
pub mod distribution;
pub mod exec;
pub mod format;
pub mod groups;
pub mod report;
pub mod roc;
pub mod simulation;
pub mod threshold;

use thiserror::Error;

pub use bands::{assign_bands, band_audit, calibration_table, BandError, BandSpec};
pub use dataset::{load_csv, CsvSchema, Dataset, DatasetError, ErrorProfile, Label, Record};
pub use distribution::{
    compare_auc, confidence_interval, expected_auc, expected_auc_table, expected_se, AucEstimate,
    DistributionError, ExpectedAucTable,
};
pub use exec::Execution;
pub use groups::{group_auc, group_rates_at, GroupError, GroupReport};
pub use report::{emit_expected_table, run_audit, AuditConfig, AuditReport};
pub use roc::{auc_rank, auc_trapezoid, confusion_at, roc_curve, RocError};
pub use simulation::{simulate_auc, simulate_random_classifier, SimConfig, SimError, SimResult};
pub use threshold::{implied_cost_ratio, optimal_threshold, CostSpec, ThresholdError};

/// Any failure, tagged with the module it came from.
#[derive(Debug, Error)]
pub enum AuditError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Roc(#[from] RocError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error(transparent)]
    Band(#[from] BandError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
    #[error("{0}")]
    Config(String),
}

impl AuditError {
    pub fn module(&self) -> &'static str {
        match self {
            AuditError::Dataset(_) => "dataset",
            AuditError::Roc(_) => "roc_metrics",
            AuditError::Distribution(_) => "auc_distribution",
            AuditError::Threshold(_) => "threshold_cost",
            AuditError::Band(_) => "risk_bands",
            AuditError::Group(_) => "group_audit",
            AuditError::Simulation(_) => "simulation",
            AuditError::Output { .. } | AuditError::Config(_) => "cli_report",
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AuditError::Dataset(e) => e.kind(),
            AuditError::Roc(e) => e.kind(),
            AuditError::Distribution(e) => e.kind(),
            AuditError::Threshold(e) => e.kind(),
            AuditError::Band(e) => e.kind(),
            AuditError::Group(e) => e.kind(),
            AuditError::Simulation(e) => e.kind(),
            AuditError::Output { .. } => "output",
            AuditError::Config(_) => "config",
        }
    }

    /// `{"error":{"module":…,"kind":…,"message":…}}` on one line.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({
            "error": {
                "module": self.module(),
                "kind": self.kind(),
                "message": self.to_string(),
            }
        })
        .to_string()
    }
}
