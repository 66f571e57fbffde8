//! Closed-form AUC distribution: expected AUC for a fixed error profile, the
//! Hanley–McNeil standard error, normal-approximation intervals, expected-AUC
//! tables and SE-based comparison of two AUC values.
//!
//! Expected AUC (Cortes & Mohri), for n = n_yes + n_no, ε = n_err / n:
//!
//! ```text
//! 1 − ε − (n_no − n_yes)²(n + 1) / (4 n_no n_yes) · (ε − Σ_{ℓ=0}^{n_err−1} C(n,ℓ) / Σ_{ℓ=0}^{n_err} C(n+1,ℓ))
//! ```
//!
//! The mean averages uniformly over every ranking whose cut misclassifies
//! exactly `n_err` records. It is a realizable mean only for
//! `n_err <= min(n_yes, n_no)`; outside that range the formula is still
//! evaluated (tables print those cells) but can leave [0, 1].

pub mod binomial;

use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::dataset::ErrorProfile;
use crate::exec::{map_indexed, Execution};
use crate::format::{fixed3, percent};
use binomial::{binomial_sum_ratio, LnFactorials};

#[derive(Debug, Error, PartialEq)]
pub enum DistributionError {
    #[error("invalid error profile ({n_yes} yes, {n_no} no, {n_err} errors): {reason}")]
    InvalidProfile {
        n_yes: usize,
        n_no: usize,
        n_err: usize,
        reason: &'static str,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("both standard errors are zero; AUC values differ by exactly {difference}")]
    ZeroVariance { difference: f64 },
}

impl DistributionError {
    pub fn kind(&self) -> &'static str {
        match self {
            DistributionError::InvalidProfile { .. } => "invalid_profile",
            DistributionError::InvalidArgument(_) => "invalid_argument",
            DistributionError::ZeroVariance { .. } => "zero_variance",
        }
    }
}

fn check_profile(p: &ErrorProfile) -> Result<(), DistributionError> {
    let reason = if p.n_yes == 0 {
        Some("n_yes must be at least 1")
    } else if p.n_no == 0 {
        Some("n_no must be at least 1")
    } else if p.n_err > p.n() {
        Some("n_err exceeds n")
    } else {
        None
    };
    match reason {
        Some(reason) => Err(DistributionError::InvalidProfile {
            n_yes: p.n_yes,
            n_no: p.n_no,
            n_err: p.n_err,
            reason,
        }),
        None => Ok(()),
    }
}

/// (n_no − n_yes)²(n + 1) / (4 n_no n_yes); zero for balanced classes.
pub fn imbalance_coefficient(n_yes: usize, n_no: usize) -> f64 {
    let diff = n_no.abs_diff(n_yes) as f64;
    let n = (n_yes + n_no) as f64;
    diff * diff * (n + 1.0) / (4.0 * n_no as f64 * n_yes as f64)
}

/// Expected AUC over all rankings with `p.n_err` misclassifications.
pub fn expected_auc(p: &ErrorProfile) -> Result<f64, DistributionError> {
    check_profile(p)?;
    let facts = LnFactorials::new(p.n() + 1);
    Ok(expected_auc_unchecked(p, &facts))
}

/// `facts` must cover `p.n() + 1`; the profile must already be valid.
fn expected_auc_unchecked(p: &ErrorProfile, facts: &LnFactorials) -> f64 {
    if p.n_err == 0 {
        return 1.0;
    }
    let eps = p.error_rate();
    if p.n_yes == p.n_no {
        return 1.0 - eps;
    }
    let coef = imbalance_coefficient(p.n_yes, p.n_no);
    let ratio = binomial_sum_ratio(facts, p.n(), p.n_err);
    1.0 - eps - coef * (eps - ratio)
}

/// Hanley–McNeil standard error of an AUC `theta` with one class-size factor
/// per class:
/// sqrt([θ(1−θ) + (n_yes−1)(Q₁−θ²) + (n_no−1)(Q₂−θ²)] / (n_yes·n_no)),
/// Q₁ = θ/(2−θ), Q₂ = 2θ²/(1+θ).
pub fn expected_se(theta: f64, n_yes: usize, n_no: usize) -> Result<f64, DistributionError> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(DistributionError::InvalidArgument(format!(
            "theta = {theta} must lie in [0, 1]"
        )));
    }
    if n_yes == 0 || n_no == 0 {
        return Err(DistributionError::InvalidArgument(format!(
            "class sizes must be at least 1 (n_yes = {n_yes}, n_no = {n_no})"
        )));
    }
    let q1 = theta / (2.0 - theta);
    let q2 = 2.0 * theta * theta / (1.0 + theta);
    let t2 = theta * theta;
    let numerator = theta * (1.0 - theta)
        + (n_yes as f64 - 1.0) * (q1 - t2)
        + (n_no as f64 - 1.0) * (q2 - t2);
    Ok((numerator.max(0.0) / (n_yes as f64 * n_no as f64)).sqrt())
}

/// Two-sided standard-normal quantile for a confidence level
/// (1.645 / 1.960 / 2.576 at 0.90 / 0.95 / 0.99).
pub fn z_for_level(level: f64) -> Result<f64, DistributionError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(DistributionError::InvalidArgument(format!(
            "confidence level {level} must lie in (0, 1)"
        )));
    }
    let normal = Normal::standard();
    Ok(normal.inverse_cdf(0.5 + level / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AucEstimate {
    pub theta: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub level: f64,
}

impl AucEstimate {
    /// θ ± z·se, clipped to [0, 1].
    pub fn from_parts(theta: f64, se: f64, level: f64) -> Result<Self, DistributionError> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(DistributionError::InvalidArgument(format!(
                "theta = {theta} must lie in [0, 1]"
            )));
        }
        if !(se >= 0.0) {
            return Err(DistributionError::InvalidArgument(format!(
                "standard error {se} must be nonnegative"
            )));
        }
        let z = z_for_level(level)?;
        let (ci_low, ci_high) = if se == 0.0 {
            (theta, theta)
        } else {
            (
                (theta - z * se).clamp(0.0, 1.0),
                (theta + z * se).clamp(0.0, 1.0),
            )
        };
        Ok(AucEstimate {
            theta,
            se,
            ci_low,
            ci_high,
            level,
        })
    }

    /// Interval for an observed AUC with Hanley–McNeil SE at the given class sizes.
    pub fn for_observed(
        theta: f64,
        n_yes: usize,
        n_no: usize,
        level: f64,
    ) -> Result<Self, DistributionError> {
        let se = expected_se(theta, n_yes, n_no)?;
        Self::from_parts(theta, se, level)
    }
}

/// Interval around the expected AUC of a profile, using the SE at that θ.
pub fn confidence_interval(p: &ErrorProfile, level: f64) -> Result<AucEstimate, DistributionError> {
    let theta = expected_auc(p)?;
    if !(0.0..=1.0).contains(&theta) {
        return Err(DistributionError::InvalidProfile {
            n_yes: p.n_yes,
            n_no: p.n_no,
            n_err: p.n_err,
            reason: "expected AUC falls outside [0, 1]; n_err exceeds the smaller class",
        });
    }
    AucEstimate::for_observed(theta, p.n_yes, p.n_no, level)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Distinguishable,
    Indistinguishable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AucComparison {
    pub difference: f64,
    pub z: f64,
    pub p_value: f64,
    pub level: f64,
    pub verdict: Verdict,
    pub assumption: String,
}

pub const INDEPENDENCE_ASSUMPTION: &str =
    "the two AUC estimates are treated as independent (no shared-sample covariance)";

/// z = (θ_a − θ_b) / sqrt(se_a² + se_b²) with a two-sided normal p-value.
pub fn compare_auc(
    a: &AucEstimate,
    b: &AucEstimate,
    level: f64,
) -> Result<AucComparison, DistributionError> {
    let z_crit = z_for_level(level)?;
    let difference = a.theta - b.theta;
    let pooled = (a.se * a.se + b.se * b.se).sqrt();
    let z = if difference == 0.0 {
        0.0
    } else if pooled == 0.0 {
        return Err(DistributionError::ZeroVariance { difference });
    } else {
        difference / pooled
    };
    let p_value = erfc(z.abs() / std::f64::consts::SQRT_2);
    let verdict = if z.abs() < z_crit {
        Verdict::Indistinguishable
    } else {
        Verdict::Distinguishable
    };
    Ok(AucComparison {
        difference,
        z,
        p_value,
        level,
        verdict,
        assumption: INDEPENDENCE_ASSUMPTION.to_string(),
    })
}

/// Class balances 0.50, 0.55, …, 0.90.
pub fn default_k_values() -> Vec<f64> {
    (0..9).map(|i| (50 + 5 * i) as f64 / 100.0).collect()
}

/// Error rates 0%, 2.5%, …, 32.5%.
pub fn default_eps_values() -> Vec<f64> {
    (0..14).map(|i| (25 * i) as f64 / 1000.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub k: f64,
    pub eps: f64,
    pub profile: Option<ErrorProfile>,
    /// Unrounded expected AUC; `None` when the cell's profile is invalid.
    pub value: Option<f64>,
    pub error: Option<String>,
}

impl TableCell {
    pub fn rounded(&self) -> Option<f64> {
        self.value.map(|v| (v * 1000.0).round() / 1000.0)
    }

    pub fn is_sub_random(&self) -> bool {
        self.value.is_some_and(|v| v < 0.5)
    }

    /// What a rendered table shows: present unless invalid, or below 0.5 with
    /// `keep_sub_random` off.
    pub fn displayed(&self, keep_sub_random: bool) -> Option<f64> {
        match self.value {
            Some(v) if keep_sub_random || v >= 0.5 => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedAucTable {
    pub n: usize,
    pub k_values: Vec<f64>,
    pub eps_values: Vec<f64>,
    /// Row per k, column per ε.
    pub cells: Vec<Vec<TableCell>>,
}

impl ExpectedAucTable {
    pub fn cell(&self, k_index: usize, eps_index: usize) -> &TableCell {
        &self.cells[k_index][eps_index]
    }

    /// Header `k,0%,2.5%,…`; one row per k with 3-decimal cells. Omitted cells
    /// are empty strings.
    pub fn write_csv<W: Write>(&self, mut w: W, keep_sub_random: bool) -> std::io::Result<()> {
        let header: Vec<String> = std::iter::once("k".to_string())
            .chain(self.eps_values.iter().map(|&e| percent(e)))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for (k, row) in self.k_values.iter().zip(&self.cells) {
            let cells: Vec<String> = std::iter::once(format!("{k:.2}"))
                .chain(
                    row.iter()
                        .map(|c| c.displayed(keep_sub_random).map(fixed3).unwrap_or_default()),
                )
                .collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self, keep_sub_random: bool) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, keep_sub_random)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

pub fn expected_auc_table(
    n: usize,
    k_values: &[f64],
    eps_values: &[f64],
) -> Result<ExpectedAucTable, DistributionError> {
    expected_auc_table_with(n, k_values, eps_values, Execution::default())
}

/// Cells are independent; parallel and sequential runs are bitwise identical.
pub fn expected_auc_table_with(
    n: usize,
    k_values: &[f64],
    eps_values: &[f64],
    exec: Execution,
) -> Result<ExpectedAucTable, DistributionError> {
    if n < 2 {
        return Err(DistributionError::InvalidArgument(format!(
            "table sample size n = {n} must be at least 2"
        )));
    }
    if let Some(k) = k_values.iter().find(|k| !(**k > 0.0 && **k < 1.0)) {
        return Err(DistributionError::InvalidArgument(format!(
            "class balance k = {k} must lie in (0, 1)"
        )));
    }
    if let Some(e) = eps_values.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(DistributionError::InvalidArgument(format!(
            "error rate {e} must lie in [0, 1]"
        )));
    }
    let facts = LnFactorials::new(n + 1);
    let cols = eps_values.len();
    let flat = map_indexed(exec, k_values.len() * cols, |i| {
        let (k, eps) = (k_values[i / cols], eps_values[i % cols]);
        let profile = ErrorProfile::from_rates(n, k, eps).ok();
        let checked = match profile {
            Some(p) => check_profile(&p).map(|_| expected_auc_unchecked(&p, &facts)),
            None => Err(DistributionError::InvalidArgument(format!(
                "cannot discretize k = {k}, eps = {eps} at n = {n}"
            ))),
        };
        let (value, error) = match checked {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        TableCell {
            k,
            eps,
            profile,
            value,
            error,
        }
    });
    let mut cells = Vec::with_capacity(k_values.len());
    let mut it = flat.into_iter();
    for _ in k_values {
        cells.push(it.by_ref().take(cols).collect());
    }
    Ok(ExpectedAucTable {
        n,
        k_values: k_values.to_vec(),
        eps_values: eps_values.to_vec(),
        cells,
    })
}
