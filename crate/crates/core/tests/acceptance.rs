//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

#[path = "common/exact.rs"]
#[allow(dead_code)]
mod exact;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use auc_audit::bands::{assign_bands, band_audit, calibration_table, BandSpec, TruthLevels};
use auc_audit::dataset::{Dataset, ErrorProfile, Label, Record};
use auc_audit::distribution::{
    default_eps_values, default_k_values, expected_auc, expected_auc_table, expected_se,
};
use auc_audit::groups::group_auc;
use auc_audit::roc::{accuracy, auc_rank, auc_trapezoid, candidate_thresholds, confusion_at, roc_curve};
use auc_audit::simulation::{simulate_auc, simulate_random_classifier, SimConfig};
use auc_audit::threshold::{cost_at, optimal_threshold, CostSpec};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn run(id: u32, title: &str, budget: Duration, f: fn() -> Outcome) -> bool {
    let start = Instant::now();
    let out = std::panic::catch_unwind(f).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Outcome::new(false, format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = out.pass && in_time;
    let timing = if in_time {
        format!("{:.2}s", elapsed.as_secs_f64())
    } else {
        format!("{:.2}s, over the {}s budget", elapsed.as_secs_f64(), budget.as_secs())
    };
    println!(
        "criterion {id:>2} {} {title}: {} ({timing})",
        if pass { "PASS" } else { "FAIL" },
        out.detail
    );
    pass
}

// ---------------------------------------------------------------- 1

fn pattern_dataset(pattern: &str) -> (Dataset, f64) {
    // the cut sits at the first record after '|'
    let cut = pattern.find('|').expect("pattern has a cut") + 1;
    (Dataset::from_rank_pattern(pattern), cut as f64)
}

fn criterion_1() -> Outcome {
    let cases = [
        ("A", "---++|--+++", 0.84, 0.60),
        ("B", "+----|++++-", 0.64, 0.80),
        ("C", "---+-|+-+++", 0.88, 0.80),
        ("D", "----|++++-+", 0.84, 0.90),
    ];
    let mut bad = Vec::new();
    for (name, pattern, auc, acc) in cases {
        let (d, cut) = pattern_dataset(pattern);
        let rank = auc_rank(&d).unwrap().auc;
        let trap = auc_trapezoid(&roc_curve(&d).unwrap());
        let a = accuracy(&confusion_at(&d, cut)).unwrap();
        if (rank - auc).abs() > 1e-12 || (trap - auc).abs() > 1e-12 || (a - acc).abs() > 1e-12 {
            bad.push(format!("{name}: rank {rank}, trapezoid {trap}, accuracy {a}"));
        }
    }
    if bad.is_empty() {
        Outcome::new(true, "A 0.84/0.60, B 0.64/0.80, C 0.88/0.80, D 0.84/0.90 via rank and trapezoid")
    } else {
        Outcome::new(false, bad.join("; "))
    }
}

// ---------------------------------------------------------------- 2

/// Printed n = 50 table; `None` marks an omitted (below 0.5) cell.
const N50: [[Option<f64>; 14]; 9] = {
    const X: Option<f64> = None;
    macro_rules! r {
        ($($v:expr),*) => { [$($v),*] };
    }
    [
        r!(Some(1.000), Some(0.980), Some(0.960), Some(0.920), Some(0.900), Some(0.880), Some(0.840), Some(0.820), Some(0.800), Some(0.780), Some(0.760), Some(0.720), Some(0.700), Some(0.680)),
        r!(Some(1.000), Some(0.980), Some(0.959), Some(0.919), Some(0.899), Some(0.878), Some(0.838), Some(0.817), Some(0.797), Some(0.776), Some(0.756), Some(0.715), Some(0.694), Some(0.674)),
        r!(Some(1.000), Some(0.978), Some(0.957), Some(0.913), Some(0.891), Some(0.869), Some(0.825), Some(0.802), Some(0.780), Some(0.757), Some(0.734), Some(0.687), Some(0.663), Some(0.639)),
        r!(Some(1.000), Some(0.977), Some(0.953), Some(0.906), Some(0.882), Some(0.858), Some(0.809), Some(0.784), Some(0.759), Some(0.733), Some(0.707), Some(0.653), Some(0.625), Some(0.596)),
        r!(Some(1.000), Some(0.973), Some(0.945), Some(0.888), Some(0.859), Some(0.830), Some(0.770), Some(0.739), Some(0.707), Some(0.675), Some(0.641), Some(0.570), Some(0.533), X),
        r!(Some(1.000), Some(0.965), Some(0.930), Some(0.858), Some(0.821), Some(0.783), Some(0.704), Some(0.663), Some(0.620), Some(0.575), Some(0.529), X, X, X),
        r!(Some(1.000), Some(0.958), Some(0.915), Some(0.826), Some(0.780), Some(0.733), Some(0.634), Some(0.581), Some(0.527), X, X, X, X, X),
        r!(Some(1.000), Some(0.946), Some(0.891), Some(0.777), Some(0.717), Some(0.655), Some(0.524), X, X, X, X, X, X, X),
        r!(Some(1.000), Some(0.910), Some(0.818), Some(0.624), Some(0.522), X, X, X, X, X, X, X, X, X),
    ]
};

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() < 1e-9
}

fn criterion_2() -> Outcome {
    let ks = default_k_values();
    let eps = default_eps_values();
    let table = expected_auc_table(50, &ks, &eps).unwrap();
    let (mut printed, mut tight, mut worst, mut worst_tight) = (0, 0, 0.0f64, 0.0f64);
    let mut bad = Vec::new();
    for (i, k) in ks.iter().enumerate() {
        for (j, e) in eps.iter().enumerate() {
            let Some(want) = N50[i][j] else { continue };
            printed += 1;
            let ours = table.cell(i, j).displayed(false);
            let integer = is_integer(k * 50.0) && is_integer(e * 50.0);
            let tol = if integer { 0.001 } else { 0.01 };
            match ours {
                Some(v) => {
                    let diff = (v - want).abs();
                    worst = worst.max(diff);
                    if integer {
                        tight += 1;
                        worst_tight = worst_tight.max(diff);
                    }
                    if diff > tol + 1e-12 {
                        bad.push(format!("k={k:.2} eps={e}: {v:.4} vs {want}"));
                    }
                }
                None => bad.push(format!("k={k:.2} eps={e}: omitted vs {want}")),
            }
        }
    }
    let detail = format!(
        "{printed} printed cells, max |diff| {worst:.4}; {tight} integer cells, max |diff| {worst_tight:.4}"
    );
    if bad.is_empty() {
        Outcome::new(true, detail)
    } else {
        Outcome::new(false, format!("{detail}; off: {}", bad.join(", ")))
    }
}

// ---------------------------------------------------------------- 3

fn criterion_3() -> Outcome {
    let eps = default_eps_values();
    let mut checked = 0;
    for n in [50, 500, 5000] {
        let t = expected_auc_table(n, &[0.5], &eps).unwrap();
        for (j, e) in eps.iter().enumerate() {
            let cell = t.cell(0, j);
            let p = cell.profile.unwrap();
            let v = cell.value.unwrap();
            if v != 1.0 - p.error_rate() {
                return Outcome::new(false, format!("n={n} eps={e}: {v} != 1 - {}", p.error_rate()));
            }
            if is_integer(e * n as f64) && v != 1.0 - e {
                return Outcome::new(false, format!("n={n} eps={e}: {v} != {}", 1.0 - e));
            }
            checked += 1;
        }
    }
    Outcome::new(true, format!("{checked} cells equal 1 - eps bit for bit"))
}

// ---------------------------------------------------------------- 4

fn criterion_4() -> Outcome {
    let ks = default_k_values();
    let eps = default_eps_values();
    let a = expected_auc_table(5000, &ks, &eps).unwrap();
    let b = expected_auc_table(10000, &ks, &eps).unwrap();
    let (mut shared, mut same_rounded, mut worst) = (0, 0, 0.0f64);
    for i in 0..ks.len() {
        for j in 0..eps.len() {
            if let (Some(x), Some(y)) = (a.cell(i, j).displayed(false), b.cell(i, j).displayed(false)) {
                shared += 1;
                worst = worst.max((x - y).abs());
                same_rounded += (a.cell(i, j).rounded() == b.cell(i, j).rounded()) as usize;
            }
        }
    }
    Outcome::new(
        worst <= 5e-4,
        format!("{shared} shared cells, max |diff| {worst:.2e} (limit 5e-4), {same_rounded} identical after rounding"),
    )
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Outcome {
    let (mut count, mut worst, mut worst_at) = (0u64, 0.0f64, (0, 0, 0));
    for n in 2..=200usize {
        let pn = exact::binomial_prefix(n);
        let pn1 = exact::binomial_prefix(n + 1);
        for e in 0..=n {
            let bracket = exact::Bracket::new(&pn, &pn1, n, e);
            for n_yes in 1..n {
                let n_no = n - n_yes;
                let p = ErrorProfile::new(n_yes, n_no, e).unwrap();
                let fast = expected_auc(&p).unwrap();
                let exact = exact::expected_auc_exact(n_yes, n_no, e, &bracket);
                let scale = if p.within_closed_form_domain() {
                    exact.abs()
                } else {
                    exact.abs().max(1.0)
                };
                let rel = (fast - exact).abs() / scale;
                if rel > worst {
                    worst = rel;
                    worst_at = (n_yes, n_no, e);
                }
                count += 1;
            }
        }
    }
    Outcome::new(
        worst <= 1e-10,
        format!(
            "{count} profiles (n <= 200), max relative error {worst:.2e} at (n_yes, n_no, n_err) = {worst_at:?}"
        ),
    )
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let trials = 10_000;
    let mut over3 = Vec::new();
    let mut over4 = Vec::new();
    let mut sd_order_bad = Vec::new();
    for n in [20usize, 50, 100] {
        for eps in [0.05, 0.1, 0.2] {
            let mut sds = Vec::new();
            for k in [0.5, 0.7, 0.9] {
                let p = ErrorProfile::from_rates(n, k, eps).unwrap();
                let target = expected_auc(&p).unwrap();
                let r = simulate_auc(&SimConfig::new(p, trials, 2026)).unwrap();
                let z = (r.mean - target) / r.mc_se();
                let label = format!(
                    "(n={n},k={k},eps={eps}; {}/{}/{}{}) z={z:.1}",
                    p.n_yes,
                    p.n_no,
                    p.n_err,
                    if p.within_closed_form_domain() { "" } else { ", n_err > min class" }
                );
                if z.abs() > 4.0 {
                    over4.push(label);
                } else if z.abs() > 3.0 {
                    over3.push(label);
                }
                sds.push(r.sd);
            }
            if !(sds[0] < sds[1] && sds[1] < sds[2]) {
                sd_order_bad.push(format!("n={n},eps={eps}: sd {sds:.4?}"));
            }
        }
    }
    let pass = over4.is_empty() && over3.len() <= 1 && sd_order_bad.is_empty();
    let mut detail = format!(
        "27 cells: {} beyond 4 SE, {} between 3 and 4 SE; sd increases with k in {}/9 (n, eps) pairs",
        over4.len(),
        over3.len(),
        9 - sd_order_bad.len()
    );
    for (name, list) in [("beyond 4 SE", &over4), ("3-4 SE", &over3), ("sd order", &sd_order_bad)] {
        if !list.is_empty() {
            detail.push_str(&format!("; {name}: {}", list.join(", ")));
        }
    }
    Outcome::new(pass, detail)
}

// ---------------------------------------------------------------- 7

fn criterion_7() -> Outcome {
    for (ny, nn) in [(1, 1), (5, 95), (50, 50), (1000, 3)] {
        let se = expected_se(1.0, ny, nn).unwrap();
        if se != 0.0 {
            return Outcome::new(false, format!("expected_se(1, {ny}, {nn}) = {se}"));
        }
    }
    let se = expected_se(0.9, 50, 50).unwrap();
    let p = ErrorProfile::new(50, 50, 10).unwrap();
    let r = simulate_auc(&SimConfig::binomial(p, 100_000, 7)).unwrap();
    let rel = (se - r.sd).abs() / r.sd;
    Outcome::new(
        rel <= 0.15,
        format!(
            "se(1, .) = 0; se(0.9, 50, 50) = {se:.4} vs simulated sd {:.4} (binomial error count, eps = 0.1, 1e5 trials): rel. error {:.1}%",
            r.sd,
            rel * 100.0
        ),
    )
}

// ---------------------------------------------------------------- 8

fn labeled(scores: &[u8], yes: &[bool]) -> Option<Dataset> {
    let d = Dataset::from_scores(
        scores
            .iter()
            .zip(yes)
            .map(|(&s, &y)| (s as f64, if y { Label::Yes } else { Label::No })),
    )
    .ok()?;
    (d.n_yes() > 0 && d.n_no() > 0).then_some(d)
}

fn records_strategy(max_score: u8) -> impl Strategy<Value = (Vec<u8>, Vec<bool>)> {
    (2usize..40).prop_flat_map(move |n| {
        (
            prop::collection::vec(0..=max_score, n),
            prop::collection::vec(any::<bool>(), n),
        )
    })
}

fn check<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&strategy, test)
        .map_err(|e| format!("{name}: {e}"))
}

fn prop_trapezoid_rank() -> Result<(), String> {
    check("trapezoid = rank", records_strategy(5), |(s, y)| {
        if let Some(d) = labeled(&s, &y) {
            let a = auc_rank(&d).unwrap().auc;
            let b = auc_trapezoid(&roc_curve(&d).unwrap());
            prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
        Ok(())
    })
}

fn prop_monotone() -> Result<(), String> {
    check("monotone invariance", records_strategy(30), |(s, y)| {
        if let Some(d) = labeled(&s, &y) {
            let a = auc_rank(&d).unwrap().auc;
            for f in [|x: f64| 2.0 * x + 7.0, |x: f64| x * x * x, |x: f64| (x / 4.0).exp(), |x: f64| x / 2.0] {
                let b = auc_rank(&d.map_scores(f).unwrap()).unwrap().auc;
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
        Ok(())
    })
}

fn prop_swap() -> Result<(), String> {
    check("label swap", records_strategy(8), |(s, y)| {
        if let Some(d) = labeled(&s, &y) {
            let a = auc_rank(&d).unwrap().auc;
            let b = auc_rank(&d.swap_labels()).unwrap().auc;
            prop_assert!((a + b - 1.0).abs() <= 1e-12);
        }
        Ok(())
    })
}

fn prop_unit_cost_is_max_accuracy() -> Result<(), String> {
    check("unit cost = max accuracy", records_strategy(10), |(s, y)| {
        if let Some(d) = labeled(&s, &y) {
            let mut best = (f64::NEG_INFINITY, f64::NAN);
            // candidates run from the highest threshold down; keep the first maximizer
            for t in candidate_thresholds(&d) {
                let acc = accuracy(&confusion_at(&d, t)).unwrap();
                if acc > best.0 {
                    best = (acc, t);
                }
            }
            let opt = optimal_threshold(&d, &CostSpec::unit()).unwrap();
            prop_assert_eq!(opt.threshold, best.1);
        }
        Ok(())
    })
}

fn prop_brute_force_cost() -> Result<(), String> {
    let strategy = (records_strategy(10), 0.0f64..10.0, 0.01f64..10.0);
    check("optimal = brute force", strategy, |((s, y), c_fp, c_fn)| {
        if let Some(d) = labeled(&s, &y) {
            let spec = CostSpec::new(c_fp, c_fn).unwrap();
            let min = candidate_thresholds(&d)
                .into_iter()
                .map(|t| cost_at(&d, t, &spec))
                .fold(f64::INFINITY, f64::min);
            let largest = candidate_thresholds(&d)
                .into_iter()
                .filter(|&t| cost_at(&d, t, &spec) == min)
                .fold(f64::NEG_INFINITY, f64::max);
            let opt = optimal_threshold(&d, &spec).unwrap();
            prop_assert_eq!(opt.cost, min);
            prop_assert_eq!(opt.threshold, largest);
        }
        Ok(())
    })
}

fn prop_bands() -> Result<(), String> {
    let strategy = (
        prop::collection::vec(-50.0f64..50.0, 0..5),
        prop::collection::vec(-60.0f64..60.0, 1..60),
    );
    check("band monotonicity/partition", strategy, |(mut th, scores)| {
        th.sort_by(f64::total_cmp);
        th.dedup();
        let spec = BandSpec::with_default_labels(th).unwrap();
        let d = Dataset::from_scores(scores.iter().map(|&s| (s, Label::No))).unwrap();
        let bands = assign_bands(&d, &spec);
        let audit = band_audit(&d, &spec, None).unwrap();
        prop_assert_eq!(audit.bands.iter().map(|b| b.count).sum::<usize>(), d.len());
        let mut pairs: Vec<(f64, usize)> = scores.iter().copied().zip(bands).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        prop_assert!(pairs.windows(2).all(|w| w[0].1 <= w[1].1));
        Ok(())
    })
}

fn prop_group_counts() -> Result<(), String> {
    let strategy = prop::collection::vec((0u8..20, any::<bool>(), 0u8..5), 1..80);
    check("group counts reconcile", strategy, |rows| {
        let recs: Vec<Record> = rows
            .iter()
            .map(|&(s, y, g)| {
                let label = if y { Label::Yes } else { Label::No };
                Record::with_group(s as f64, label, format!("g{g}"))
            })
            .collect();
        let d = Dataset::new(recs).unwrap();
        let r = group_auc(&d, 0.95).unwrap();
        prop_assert_eq!(r.groups.iter().map(|g| g.n_yes).sum::<usize>(), d.n_yes());
        prop_assert_eq!(r.groups.iter().map(|g| g.n_no).sum::<usize>(), d.n_no());
        Ok(())
    })
}

fn criterion_8() -> Outcome {
    let props: [(&str, fn() -> Result<(), String>); 7] = [
        ("trapezoid/rank", prop_trapezoid_rank),
        ("monotone", prop_monotone),
        ("label swap", prop_swap),
        ("unit cost", prop_unit_cost_is_max_accuracy),
        ("brute-force cost", prop_brute_force_cost),
        ("bands", prop_bands),
        ("group counts", prop_group_counts),
    ];
    let failures: Vec<String> = props.iter().filter_map(|(_, p)| p().err()).collect();
    if failures.is_empty() {
        Outcome::new(true, format!("{} properties x 1000 cases", props.len()))
    } else {
        Outcome::new(false, failures.join("; "))
    }
}

// ---------------------------------------------------------------- 9

fn criterion_9() -> Outcome {
    // three score levels whose YES fraction equals the score
    let mut recs = Vec::new();
    let mut truth = Vec::new();
    for (level, (score, yes)) in [(0.1, 1), (0.5, 5), (0.9, 9)].into_iter().enumerate() {
        for i in 0..10 {
            recs.push(Record::new(score, if i < yes { Label::Yes } else { Label::No }));
            truth.push(level);
        }
    }
    let fitted = Dataset::new(recs).unwrap();
    let halved = fitted.map_scores(|s| s / 2.0).unwrap();
    let spec = BandSpec::new(
        vec![1.0 / 3.0, 2.0 / 3.0],
        vec!["low".into(), "med".into(), "high".into()],
    )
    .unwrap();
    let truth = TruthLevels { levels: 3, values: truth };

    let auc_a = auc_rank(&fitted).unwrap().auc;
    let auc_b = auc_rank(&halved).unwrap().auc;
    let bands_a = band_audit(&fitted, &spec, Some(&truth)).unwrap();
    let bands_b = band_audit(&halved, &spec, Some(&truth)).unwrap();
    let gap_a = calibration_table(&fitted, 3).unwrap().gap;
    let gap_b = calibration_table(&halved, 3).unwrap().gap;

    // separable version: AUC 1 before and after
    let sep = Dataset::from_scores((0..20).map(|i| if i < 10 { (0.0, Label::No) } else { (1.0, Label::Yes) })).unwrap();
    let sep_half = sep.map_scores(|s| s / 2.0).unwrap();
    let sep_auc = (auc_rank(&sep).unwrap().auc, auc_rank(&sep_half).unwrap().auc);
    let sep_bands_differ = assign_bands(&sep, &spec) != assign_bands(&sep_half, &spec);
    let sep_gaps = (
        calibration_table(&sep, 2).unwrap().gap,
        calibration_table(&sep_half, 2).unwrap().gap,
    );

    let pass = auc_a == auc_b
        && assign_bands(&fitted, &spec) != assign_bands(&halved, &spec)
        && bands_a.off_diagonal() == Some(0)
        && bands_b.off_diagonal().unwrap_or(0) > 0
        && gap_b > gap_a
        && sep_auc == (1.0, 1.0)
        && sep_bands_differ
        && sep_gaps.1 > sep_gaps.0;
    Outcome::new(
        pass,
        format!(
            "AUC {auc_a:.3} = {auc_b:.3}; agreement off-diagonal {} -> {}; calibration gap {gap_a:.2e} -> {gap_b:.3}; \
             separable case AUC 1 = 1, gap {:.2e} -> {:.3}",
            bands_a.off_diagonal().unwrap(),
            bands_b.off_diagonal().unwrap(),
            sep_gaps.0,
            sep_gaps.1
        ),
    )
}

// ---------------------------------------------------------------- 10

fn criterion_10() -> Outcome {
    let r = simulate_random_classifier(50, 50, 10_000, 11).unwrap();
    Outcome::new(
        (r.mean - 0.5).abs() <= 0.01,
        format!("mean {:.4} over 10000 trials (sd {:.4})", r.mean, r.sd),
    )
}

// ---------------------------------------------------------------- 11

fn write_input(dir: &Path) -> std::path::PathBuf {
    let p = dir.join("input.csv");
    let mut s = String::from("score,label,group,risk\n");
    for (g, pattern) in [("A", "---++--+++"), ("B", "+----++++-")] {
        for (i, c) in pattern.chars().enumerate() {
            let y = (c == '+') as u8;
            let risk = ["low", "med", "high"][i * 3 / 10];
            s.push_str(&format!("{},{},{},{}\n", (i + 1) as f64 / 10.0, y, g, risk));
        }
    }
    std::fs::write(&p, s).unwrap();
    p
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path());
    let run_once = |out: &Path| {
        let status = Command::new(env!("CARGO_BIN_EXE_auc-audit"))
            .args(["audit", "--input"])
            .arg(&input)
            .args(["--group-col", "group", "--bands", "0.35,0.7", "--band-labels", "low,med,high"])
            .args(["--truth-col", "risk", "--thresholds", "0.5,0.6", "--cfn", "2", "--seed", "99", "--out"])
            .arg(out)
            .output()
            .expect("binary runs");
        status.status.success()
    };
    let (a, b) = (dir.path().join("run1"), dir.path().join("run2"));
    if !run_once(&a) || !run_once(&b) {
        return Outcome::new(false, "audit exited with an error");
    }
    let files = ["report.json", "roc.csv", "thresholds.csv", "bands.csv", "groups.csv", "calibration.csv"];
    let differing: Vec<&str> = files
        .iter()
        .copied()
        .filter(|f| std::fs::read(a.join(f)).ok() != std::fs::read(b.join(f)).ok())
        .collect();
    if differing.is_empty() {
        Outcome::new(true, format!("{} files byte-identical across two runs", files.len()))
    } else {
        Outcome::new(false, format!("differ: {}", differing.join(", ")))
    }
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        run(1, "worked ranking examples", s(1), criterion_1),
        run(2, "n=50 expected-AUC table", s(5), criterion_2),
        run(3, "balanced rows equal 1 - eps", s(30), criterion_3),
        run(4, "n=5000 vs n=10000 stability", s(60), criterion_4),
        run(5, "log-space vs exact rational", s(60), criterion_5),
        run(6, "Monte Carlo consistency", s(120), criterion_6),
        run(7, "SE degeneracies", s(60), criterion_7),
        run(8, "property suites", s(120), criterion_8),
        run(9, "halved-score fit example", s(5), criterion_9),
        run(10, "random-classifier baseline", s(30), criterion_10),
        run(11, "CLI determinism", s(60), criterion_11),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
