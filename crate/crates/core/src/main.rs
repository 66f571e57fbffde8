use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use auc_audit::bands::{band_audit, calibration_table_with, BandSpec, Binning, TruthLevels};
use auc_audit::dataset::{load_csv, load_csv_column, CsvSchema, Dataset, ErrorProfile};
use auc_audit::distribution::{
    compare_auc, confidence_interval, default_eps_values, default_k_values, expected_auc, expected_se,
    AucEstimate,
};
use auc_audit::groups::group_report;
use auc_audit::report::{emit_expected_table, run_audit, AuditConfig, DEFAULT_CALIBRATION_BINS, DEFAULT_TRIALS};
use auc_audit::roc::{auc_rank, auc_trapezoid, roc_curve};
use auc_audit::simulation::{
    simulate_auc_with, simulate_random_classifier_with, ErrorCount, SimConfig, SimResult,
};
use auc_audit::threshold::{implied_cost_ratio, optimal_threshold, threshold_sweep, write_sweep_csv, CostSpec};
use auc_audit::{AuditError, Execution};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "auc-audit", version, about = "ROC/AUC audit toolkit", allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// CSV file with a header row.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "score")]
    score_col: String,
    #[arg(long, default_value = "label")]
    label_col: String,
    #[arg(long)]
    group_col: Option<String>,
}

impl InputArgs {
    fn schema(&self) -> CsvSchema {
        CsvSchema {
            score_col: self.score_col.clone(),
            label_col: self.label_col.clone(),
            group_col: self.group_col.clone(),
            ..CsvSchema::default()
        }
    }

    fn load(&self) -> Result<Dataset, AuditError> {
        Ok(load_csv(&self.input, &self.schema())?)
    }
}

#[derive(Args, Clone)]
struct CostArgs {
    /// Cost of a false positive.
    #[arg(long, default_value_t = 1.0)]
    cfp: f64,
    /// Cost of a false negative.
    #[arg(long, default_value_t = 1.0)]
    cfn: f64,
}

#[derive(Args, Clone)]
struct BandArgs {
    /// Band thresholds "λ1,λ2,…", strictly increasing.
    #[arg(long, value_delimiter = ',')]
    bands: Vec<f64>,
    /// Band labels "a,b,c" (one more than thresholds).
    #[arg(long, value_delimiter = ',')]
    band_labels: Vec<String>,
    /// Column of ordinal truth levels (band labels or 0-based indices).
    #[arg(long)]
    truth_col: Option<String>,
}

impl BandArgs {
    fn spec(&self) -> Result<BandSpec, AuditError> {
        Ok(if self.band_labels.is_empty() {
            BandSpec::with_default_labels(self.bands.clone())?
        } else {
            BandSpec::new(self.bands.clone(), self.band_labels.clone())?
        })
    }
}

/// Either explicit counts or (n, k, eps) rates.
#[derive(Args, Clone)]
struct ProfileArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Class balance n_no / n.
    #[arg(long)]
    k: Option<f64>,
    /// Error rate n_err / n.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    n_yes: Option<usize>,
    #[arg(long)]
    n_no: Option<usize>,
    #[arg(long)]
    n_err: Option<usize>,
}

impl ProfileArgs {
    fn profile(&self) -> Result<ErrorProfile, AuditError> {
        match (self.n_yes, self.n_no, self.n, self.k, self.eps) {
            (Some(y), Some(no), _, _, _) => Ok(ErrorProfile::new(y, no, self.n_err.unwrap_or(0))?),
            (_, _, Some(n), Some(k), Some(eps)) => Ok(ErrorProfile::from_rates(n, k, eps)?),
            _ => Err(AuditError::Config(
                "give either --n-yes/--n-no[/--n-err] or --n/--k/--eps".into(),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Rank and trapezoid AUC with a confidence interval.
    Auc {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
    /// ROC points as fpr,tpr,threshold.
    Roc {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expected-AUC table over class balance and error rate.
    ExpectedTable {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',')]
        k: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        /// Print cells below 0.5 instead of leaving them empty.
        #[arg(long)]
        keep_sub_random: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Standard error of an AUC value.
    Se {
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        n_yes: usize,
        #[arg(long)]
        n_no: usize,
    },
    /// Confidence interval around the expected AUC of an error profile.
    Ci {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
    /// Whether two AUC values are distinguishable given their standard errors.
    Compare {
        #[arg(long)]
        theta_a: f64,
        #[arg(long)]
        n_yes_a: usize,
        #[arg(long)]
        n_no_a: usize,
        #[arg(long)]
        theta_b: f64,
        #[arg(long)]
        n_yes_b: usize,
        #[arg(long)]
        n_no_b: usize,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
    /// Cost-optimal threshold and the threshold sweep.
    Threshold {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        cost: CostArgs,
        /// Sweep CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Risk-band audit.
    Bands {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        bands: BandArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-group AUC and error rates.
    Groups {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_delimiter = ',')]
        thresholds: Vec<f64>,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Calibration table and gap.
    Calibrate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = DEFAULT_CALIBRATION_BINS)]
        bins: usize,
        /// Quantile bins instead of equal-width bins.
        #[arg(long)]
        equal_count: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo AUC distribution for an error profile.
    Simulate {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, env = "AUC_AUDIT_SEED", default_value_t = 0)]
        seed: u64,
        /// Draw the error count per trial from Binomial(n, eps).
        #[arg(long)]
        binomial_errors: bool,
        /// Score records i.i.d. uniform instead (ignores the error count).
        #[arg(long)]
        random_classifier: bool,
        /// Write every sample as trial,auc.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
    },
    /// Full audit: report.json plus CSVs in --out.
    Audit {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        cost: CostArgs,
        #[command(flatten)]
        bands: BandArgs,
        #[arg(long, value_delimiter = ',')]
        thresholds: Vec<f64>,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "AUC_AUDIT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_CALIBRATION_BINS)]
        bins: usize,
    },
}

/// Where a command writes: `--out` files go to disk, everything else to
/// these two streams.
struct Streams<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Streams<'_> {
    fn emit(&mut self, path: Option<&PathBuf>, text: &str) -> Result<(), AuditError> {
        match path {
            Some(p) => std::fs::write(p, text).map_err(|e| AuditError::Output {
                path: p.display().to_string(),
                message: e.to_string(),
            }),
            None => self.out.write_all(text.as_bytes()).map_err(|e| AuditError::Output {
                path: "<stdout>".into(),
                message: e.to_string(),
            }),
        }
    }

    fn note(&mut self, line: &str) {
        // diagnostics are best-effort
        let _ = writeln!(self.err, "{line}");
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn to_string(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> String {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("output is utf-8")
}

fn run(cli: Cli, io: &mut Streams) -> Result<(), AuditError> {
    match cli.command {
        Command::Auc { input, level } => {
            let d = input.load()?;
            let rank = auc_rank(&d)?;
            let trap = auc_trapezoid(&roc_curve(&d)?);
            let est = AucEstimate::for_observed(rank.auc, d.n_yes(), d.n_no(), level)?;
            io.emit(
                None,
                &json(&serde_json::json!({
                    "auc_rank": rank.auc,
                    "auc_trapezoid": trap,
                    "rank_sum": rank.rank_sum,
                    "tie_pair_count": rank.tie_pair_count,
                    "n_yes": rank.n_yes,
                    "n_no": rank.n_no,
                    "estimate": est,
                })),
            )
        }
        Command::Roc { input, out } => io.emit(out.as_ref(), &roc_curve(&input.load()?)?.to_csv_string()),
        Command::ExpectedTable {
            n,
            k,
            eps,
            keep_sub_random,
            out,
        } => {
            let k = if k.is_empty() { default_k_values() } else { k };
            let eps = if eps.is_empty() { default_eps_values() } else { eps };
            let csv = emit_expected_table(n, &k, &eps, keep_sub_random, out.as_deref())?;
            if out.is_none() {
                io.emit(None, &csv)?;
            }
            Ok(())
        }
        Command::Se { theta, n_yes, n_no } => io.emit(
            None,
            &json(&serde_json::json!({
                "theta": theta, "n_yes": n_yes, "n_no": n_no,
                "se": expected_se(theta, n_yes, n_no)?,
            })),
        ),
        Command::Ci { profile, level } => {
            let p = profile.profile()?;
            let ci = confidence_interval(&p, level)?;
            io.emit(
                None,
                &json(&serde_json::json!({ "profile": p, "expected_auc": expected_auc(&p)?, "estimate": ci })),
            )
        }
        Command::Compare {
            theta_a,
            n_yes_a,
            n_no_a,
            theta_b,
            n_yes_b,
            n_no_b,
            level,
        } => {
            let a = AucEstimate::for_observed(theta_a, n_yes_a, n_no_a, level)?;
            let b = AucEstimate::for_observed(theta_b, n_yes_b, n_no_b, level)?;
            io.emit(
                None,
                &json(&serde_json::json!({ "a": a, "b": b, "comparison": compare_auc(&a, &b, level)? })),
            )
        }
        Command::Threshold { input, cost, out } => {
            let d = input.load()?;
            let spec = CostSpec::new(cost.cfp, cost.cfn)?;
            let best = optimal_threshold(&d, &spec)?;
            let implied = implied_cost_ratio(&d, best.threshold)?;
            if let Some(p) = &out {
                let rows = threshold_sweep(&d, &spec)?;
                io.emit(Some(p), &to_string(|w| write_sweep_csv(&rows, w)))?;
            }
            io.emit(
                None,
                &json(&serde_json::json!({ "cost": spec, "optimal": best, "implied_cost_ratio": implied })),
            )
        }
        Command::Bands { input, bands, out } => {
            let d = input.load()?;
            let spec = bands.spec()?;
            let truth = match &bands.truth_col {
                Some(col) => Some(TruthLevels {
                    levels: spec.band_count(),
                    values: spec.parse_truth(&load_csv_column(&input.input, col)?)?,
                }),
                None => None,
            };
            let audit = band_audit(&d, &spec, truth.as_ref())?;
            for w in &audit.warnings {
                io.note(&format!("warning: {w}"));
            }
            io.emit(out.as_ref(), &to_string(|w| audit.write_csv(w)))
        }
        Command::Groups {
            input,
            thresholds,
            level,
            out,
        } => {
            let d = input.load()?;
            let report = group_report(&d, &thresholds, level, Execution::default())?;
            for n in &report.notices {
                io.note(&format!("notice: {n}"));
            }
            io.note(&format!("caveat: {}", report.caveat));
            io.emit(out.as_ref(), &to_string(|w| report.write_csv(w)))
        }
        Command::Calibrate {
            input,
            bins,
            equal_count,
            out,
        } => {
            let d = input.load()?;
            let binning = if equal_count {
                Binning::EqualCount
            } else {
                Binning::EqualWidth
            };
            let table = calibration_table_with(&d, bins, binning)?;
            io.note(&format!("calibration gap: {}", auc_audit::format::sig12(table.gap)));
            io.emit(out.as_ref(), &to_string(|w| table.write_csv(w)))
        }
        Command::Simulate {
            profile,
            trials,
            seed,
            binomial_errors,
            random_classifier,
            dump,
            out,
            sequential,
        } => {
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let p = profile.profile()?;
            let result: SimResult = if random_classifier {
                simulate_random_classifier_with(p.n_yes, p.n_no, trials, seed, exec)?
            } else {
                let mut cfg = SimConfig::new(p, trials, seed);
                if binomial_errors {
                    cfg.error_count = ErrorCount::Binomial { rate: p.error_rate() };
                }
                simulate_auc_with(&cfg, exec)?
            };
            if let Some(path) = &dump {
                io.emit(Some(path), &result.samples_csv())?;
            }
            io.emit(out.as_ref(), &result.summary_csv())
        }
        Command::Audit {
            input,
            cost,
            bands,
            thresholds,
            level,
            out,
            seed,
            trials,
            bins,
        } => {
            let mut cfg = AuditConfig::new(&input.input, &out);
            cfg.schema = input.schema();
            cfg.cost = CostSpec::new(cost.cfp, cost.cfn)?;
            cfg.bands = if bands.bands.is_empty() && bands.band_labels.is_empty() {
                None
            } else {
                Some(bands.spec()?)
            };
            cfg.truth_col = bands.truth_col.clone();
            cfg.thresholds = thresholds;
            cfg.level = level;
            cfg.seed = seed;
            cfg.trials = trials;
            cfg.calibration_bins = bins;
            let report = run_audit(&cfg)?;
            for c in &report.caveats {
                io.note(&format!("caveat [{}]: {}", c.id, c.text));
            }
            Ok(())
        }
    }
}

/// Parses `args`, runs the command and returns the exit code. Errors go to
/// `err` as a single JSON line.
fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let mut io = Streams { out, err };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            if matches!(
                e.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let _ = io.out.write_all(rendered.as_bytes());
                return if e.use_stderr() { 2 } else { 0 };
            }
            let first = rendered
                .lines()
                .next()
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            io.note(&AuditError::Config(first.to_string()).to_json_line());
            return 2;
        }
    };
    match run(cli, &mut io) {
        Ok(()) => 0,
        Err(e) => {
            io.note(&e.to_json_line());
            1
        }
    }
}

fn main() -> ExitCode {
    let code = cli_main(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code)
}
