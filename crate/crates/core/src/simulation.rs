//! Monte Carlo oracle for the closed-form AUC distribution.
//!
//! A trial fixes a cut between predicted NO (below) and predicted YES (above)
//! and splits the `n_err` errors into `a` false negatives and `b = n_err − a`
//! false positives. Below the cut sit `n_no − b` NO records and `a` YES
//! records, above it `b` NO and `n_yes − a` YES; each side is shuffled
//! uniformly. The split `a` is drawn with weight
//! `C(n_no − b + a, a)·C(n_yes − a + b, b)`, the number of distinct rankings
//! it admits, so every ranking with exactly `n_err` errors is equally likely.
//!
//! Trial `i` draws from ChaCha8 seeded with `seed` on stream `i`, and results
//! are reduced in trial order, so output does not depend on [`Execution`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::ErrorProfile;
use crate::distribution::binomial::{LnFactorials, NeumaierSum};
use crate::exec::{map_indexed, Execution};

/// Above this many trials samples are not retained; quantiles come from a
/// reservoir of [`RESERVOIR_SIZE`] samples.
pub const STREAMING_THRESHOLD: usize = 1_000_000;
pub const RESERVOIR_SIZE: usize = 100_000;
const CHUNK: usize = 1 << 16;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("trials must be at least 1")]
    ZeroTrials,
    #[error("invalid profile (n_yes = {n_yes}, n_no = {n_no}, n_err = {n_err}): {reason}")]
    InvalidProfile {
        n_yes: usize,
        n_no: usize,
        n_err: usize,
        reason: &'static str,
    },
    #[error("error rate {0} must lie in [0, 1]")]
    InvalidRate(f64),
}

impl SimError {
    pub fn kind(&self) -> &'static str {
        match self {
            SimError::ZeroTrials => "zero_trials",
            SimError::InvalidProfile { .. } => "invalid_profile",
            SimError::InvalidRate(_) => "invalid_rate",
        }
    }
}

/// How many errors a trial carries.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ErrorCount {
    /// Exactly `profile.n_err` in every trial.
    #[default]
    Fixed,
    /// Drawn per trial from Binomial(n, rate): a classifier with error rate
    /// `rate` evaluated on a fresh sample.
    Binomial { rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub profile: ErrorProfile,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub error_count: ErrorCount,
}

impl SimConfig {
    pub fn new(profile: ErrorProfile, trials: usize, seed: u64) -> Self {
        SimConfig {
            profile,
            trials,
            seed,
            error_count: ErrorCount::Fixed,
        }
    }

    /// Binomial error count at rate `n_err / n` of the profile.
    pub fn binomial(profile: ErrorProfile, trials: usize, seed: u64) -> Self {
        SimConfig {
            error_count: ErrorCount::Binomial {
                rate: profile.error_rate(),
            },
            ..Self::new(profile, trials, seed)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    /// Every sample in trial order; `None` in streaming mode.
    pub samples: Option<Vec<f64>>,
    pub trials: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); 0 for a single trial.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub q025: f64,
    pub q50: f64,
    pub q975: f64,
    /// Quantiles are estimated from a reservoir rather than all samples.
    pub streamed: bool,
}

impl SimResult {
    /// Monte Carlo standard error of the mean.
    pub fn mc_se(&self) -> f64 {
        self.sd / (self.trials as f64).sqrt()
    }

    /// `statistic,value` rows.
    pub fn summary_csv(&self) -> String {
        use crate::format::sig12;
        let rows = [
            ("trials", self.trials.to_string()),
            ("mean", sig12(self.mean)),
            ("sd", sig12(self.sd)),
            ("mc_se", sig12(self.mc_se())),
            ("min", sig12(self.min)),
            ("q025", sig12(self.q025)),
            ("q50", sig12(self.q50)),
            ("q975", sig12(self.q975)),
            ("max", sig12(self.max)),
        ];
        let mut out = String::from("statistic,value\n");
        for (k, v) in rows {
            out.push_str(&format!("{k},{v}\n"));
        }
        out
    }

    /// `trial,auc` rows; empty body in streaming mode.
    pub fn samples_csv(&self) -> String {
        let mut out = String::from("trial,auc\n");
        for (i, s) in self.samples.iter().flatten().enumerate() {
            out.push_str(&format!("{},{}\n", i, crate::format::sig12(*s)));
        }
        out
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn invalid(p: &ErrorProfile, reason: &'static str) -> SimError {
    SimError::InvalidProfile {
        n_yes: p.n_yes,
        n_no: p.n_no,
        n_err: p.n_err,
        reason,
    }
}

/// Cumulative weights over the false-negative count `a`, starting at `a_min`.
struct SplitTable {
    a_min: usize,
    cumulative: Vec<f64>,
}

impl SplitTable {
    fn new(facts: &LnFactorials, n_yes: usize, n_no: usize, n_err: usize) -> Self {
        let a_min = n_err.saturating_sub(n_no);
        let a_max = n_err.min(n_yes);
        let logs: Vec<f64> = (a_min..=a_max)
            .map(|a| {
                let b = n_err - a;
                facts.ln_choose(n_no - b + a, a) + facts.ln_choose(n_yes - a + b, b)
            })
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut acc = 0.0;
        let cumulative = logs
            .iter()
            .map(|l| {
                acc += (l - top).exp();
                acc
            })
            .collect();
        SplitTable { a_min, cumulative }
    }

    fn draw(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cumulative.last().expect("nonempty split table");
        let u = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.a_min + idx.min(self.cumulative.len() - 1)
    }
}

/// Mann–Whitney AUC of a ranking given as labels in ascending score order
/// (`true` = YES), all scores distinct.
fn auc_of_sequence(seq: &[bool], n_yes: usize, n_no: usize) -> f64 {
    let mut nos_below = 0u64;
    let mut wins = 0u64;
    for &yes in seq {
        if yes {
            wins += nos_below;
        } else {
            nos_below += 1;
        }
    }
    wins as f64 / (n_yes as f64 * n_no as f64)
}

fn ranking_trial(
    rng: &mut ChaCha8Rng,
    split: &SplitTable,
    p: &ErrorProfile,
    n_err: usize,
    buf: &mut Vec<bool>,
) -> f64 {
    let a = split.draw(rng);
    let b = n_err - a;
    let below = p.n_no - b + a;
    buf.clear();
    buf.extend(std::iter::repeat_n(false, p.n_no - b));
    buf.extend(std::iter::repeat_n(true, a));
    buf.extend(std::iter::repeat_n(false, b));
    buf.extend(std::iter::repeat_n(true, p.n_yes - a));
    let (lo, hi) = buf.split_at_mut(below);
    lo.shuffle(rng);
    hi.shuffle(rng);
    auc_of_sequence(buf, p.n_yes, p.n_no)
}

/// Tracks the `RESERVOIR_SIZE` samples with the smallest keys. Keys come from
/// each trial's own stream, so the kept set does not depend on scheduling.
struct Reservoir {
    heap: BinaryHeap<(u64, OrdF64)>,
}

#[derive(Clone, Copy, PartialEq)]
struct OrdF64(f64);
impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Reservoir {
    fn offer(&mut self, key: u64, value: f64) {
        if self.heap.len() < RESERVOIR_SIZE {
            self.heap.push((key, OrdF64(value)));
        } else if let Some(&(top, _)) = self.heap.peek() {
            if key < top {
                self.heap.pop();
                self.heap.push((key, OrdF64(value)));
            }
        }
    }
}

/// Linear interpolation between order statistics (Hyndman–Fan type 7).
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn summarize_samples(samples: Vec<f64>) -> SimResult {
    let n = samples.len();
    let mean = samples.iter().copied().collect::<NeumaierSum>().total() / n as f64;
    let ss: NeumaierSum = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
    let sd = if n > 1 {
        (ss.total() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = samples.clone();
    sorted.sort_by(f64::total_cmp);
    SimResult {
        trials: n,
        mean,
        sd,
        min: sorted[0],
        max: sorted[n - 1],
        q025: quantile_sorted(&sorted, 0.025),
        q50: quantile_sorted(&sorted, 0.5),
        q975: quantile_sorted(&sorted, 0.975),
        samples: Some(samples),
        streamed: false,
    }
}

/// Runs `trials` trials of `one` (which receives the trial's rng) and reduces.
fn run_trials<F>(exec: Execution, trials: usize, seed: u64, one: F) -> SimResult
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync + Send,
{
    if trials <= STREAMING_THRESHOLD {
        let samples = map_indexed(exec, trials, |i| one(&mut trial_rng(seed, i)));
        return summarize_samples(samples);
    }

    // Welford over trial order, merged chunk by chunk.
    let (mut count, mut mean, mut m2) = (0usize, 0.0f64, 0.0f64);
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut reservoir = Reservoir {
        heap: BinaryHeap::with_capacity(RESERVOIR_SIZE + 1),
    };
    let mut start = 0;
    while start < trials {
        let len = CHUNK.min(trials - start);
        let chunk = map_indexed(exec, len, |j| {
            let mut rng = trial_rng(seed, start + j);
            let x = one(&mut rng);
            (x, rng.random::<u64>())
        });
        for (x, key) in chunk {
            count += 1;
            let delta = x - mean;
            mean += delta / count as f64;
            m2 += delta * (x - mean);
            min = min.min(x);
            max = max.max(x);
            reservoir.offer(key, x);
        }
        start += len;
    }
    let mut kept: Vec<f64> = reservoir.heap.into_iter().map(|(_, v)| v.0).collect();
    kept.sort_by(f64::total_cmp);
    SimResult {
        samples: None,
        trials,
        mean,
        sd: (m2 / (count - 1) as f64).sqrt(),
        min,
        max,
        q025: quantile_sorted(&kept, 0.025),
        q50: quantile_sorted(&kept, 0.5),
        q975: quantile_sorted(&kept, 0.975),
        streamed: true,
    }
}

pub fn simulate_auc(cfg: &SimConfig) -> Result<SimResult, SimError> {
    simulate_auc_with(cfg, Execution::default())
}

pub fn simulate_auc_with(cfg: &SimConfig, exec: Execution) -> Result<SimResult, SimError> {
    let p = cfg.profile;
    if cfg.trials == 0 {
        return Err(SimError::ZeroTrials);
    }
    if p.n_yes == 0 || p.n_no == 0 {
        return Err(invalid(&p, "both classes must be present"));
    }
    if p.n_err > p.n() {
        return Err(invalid(&p, "n_err exceeds n"));
    }
    let facts = LnFactorials::new(p.n());
    match cfg.error_count {
        ErrorCount::Fixed => {
            let split = SplitTable::new(&facts, p.n_yes, p.n_no, p.n_err);
            Ok(run_trials(exec, cfg.trials, cfg.seed, |rng| {
                let mut buf = Vec::with_capacity(p.n());
                ranking_trial(rng, &split, &p, p.n_err, &mut buf)
            }))
        }
        ErrorCount::Binomial { rate } => {
            if !(0.0..=1.0).contains(&rate) {
                return Err(SimError::InvalidRate(rate));
            }
            let dist = Binomial::new(p.n() as u64, rate).map_err(|_| SimError::InvalidRate(rate))?;
            Ok(run_trials(exec, cfg.trials, cfg.seed, |rng| {
                let n_err = dist.sample(rng) as usize;
                let split = SplitTable::new(&facts, p.n_yes, p.n_no, n_err);
                let mut buf = Vec::with_capacity(p.n());
                ranking_trial(rng, &split, &p, n_err, &mut buf)
            }))
        }
    }
}

/// AUC of a classifier that scores every record i.i.d. uniform on [0, 1).
pub fn simulate_random_classifier(
    n_yes: usize,
    n_no: usize,
    trials: usize,
    seed: u64,
) -> Result<SimResult, SimError> {
    simulate_random_classifier_with(n_yes, n_no, trials, seed, Execution::default())
}

pub fn simulate_random_classifier_with(
    n_yes: usize,
    n_no: usize,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<SimResult, SimError> {
    if trials == 0 {
        return Err(SimError::ZeroTrials);
    }
    if n_yes == 0 || n_no == 0 {
        return Err(SimError::InvalidProfile {
            n_yes,
            n_no,
            n_err: 0,
            reason: "both classes must be present",
        });
    }
    Ok(run_trials(exec, trials, seed, |rng| {
        let mut scored: Vec<(f64, bool)> = (0..n_yes + n_no)
            .map(|i| (rng.random::<f64>(), i < n_yes))
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        // ties have probability ~0; treat any as half wins via midranks
        if scored.windows(2).any(|w| w[0].0 == w[1].0) {
            let (x, y): (Vec<f64>, Vec<f64>) = (
                scored.iter().filter(|s| s.1).map(|s| s.0).collect(),
                scored.iter().filter(|s| !s.1).map(|s| s.0).collect(),
            );
            return crate::roc::auc_probability(&x, &y).expect("both classes present");
        }
        let seq: Vec<bool> = scored.iter().map(|s| s.1).collect();
        auc_of_sequence(&seq, n_yes, n_no)
    }))
}
