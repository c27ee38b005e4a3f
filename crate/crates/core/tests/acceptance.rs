//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use kaczmarz_phase::checks::{check_rate_sandwich, LemmaReport};
use kaczmarz_phase::harness::{
    run_suite, simulate, ExperimentConfig, RunSummary, Suite, VerifyParams,
};
use kaczmarz_phase::theory::{c2_asymptotic, c2_small_error, lower_bound_rate, solve_beta0};
use kaczmarz_phase::ModeTag;

/// Writes to the raw stderr handle so the lines survive output capture.
macro_rules! emit {
    ($($arg:tt)*) => {
        let _ = writeln!(std::io::stderr(), $($arg)*);
    };
}

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn record(log: &mut Vec<Outcome>, id: u32, title: &'static str, pass: bool, detail: String) {
    emit!(
        "{} [{id}] {title}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    log.push(Outcome {
        id,
        title,
        pass,
        detail,
    });
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn convergence_config(workers: usize) -> ExperimentConfig {
    ExperimentConfig::new(128, 8.0, ModeTag::Finite)
        .trials(50)
        .seed(2024)
        .workers(workers)
}

fn gap_config(mode: ModeTag, seed: u64, workers: usize) -> ExperimentConfig {
    ExperimentConfig::new(256, 6.0, mode)
        .trials(20)
        .seed(seed)
        .stride(64)
        .workers(workers)
}

const GAP_SEEDS: u64 = 10;

/// Least-squares slope of `ln(median)` against the iteration index over the
/// second half of the trace.
fn tail_log_slope(s: &RunSummary) -> f64 {
    let half = s.iters.last().copied().unwrap_or(0) / 2;
    let pts: Vec<(f64, f64)> = s
        .iters
        .iter()
        .zip(&s.median)
        .filter(|(t, _)| **t >= half)
        .map(|(&t, &v)| (t as f64, v.ln()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn suite(s: Suite) -> Vec<LemmaReport> {
    run_suite(s, &VerifyParams::with_seed(7)).expect("suite runs")
}

fn kpr(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kpr"))
        .args(args)
        .output()
        .expect("kpr runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn acceptance() {
    let mut log = Vec::new();

    // 1. Exact step identities.
    let (rep, dt) = timed(|| suite(Suite::Step));
    let r = &rep[0];
    record(
        &mut log,
        1,
        "exact step identity",
        r.trials == 10_000 && r.violations == 0 && dt.as_secs_f64() < 10.0,
        format!(
            "{} instances, {} steps, {} violations, max rel err {:.2e}, {:.2}s (< 10s)",
            r.trials,
            r.param("steps").unwrap(),
            r.violations,
            r.param("max_rel_error").unwrap(),
            dt.as_secs_f64()
        ),
    );

    // 2. Expectation oracle.
    let (rep, dt) = timed(|| suite(Suite::Expectation));
    let r = &rep[0];
    let within = r.trials - r.violations;
    record(
        &mut log,
        2,
        "expectation oracle",
        r.trials == 20 && within >= 19 && dt.as_secs_f64() < 30.0,
        format!(
            "{within}/{} instances within 4 SE (need >= 19), max |z| {:.2}, {:.2}s (< 30s)",
            r.trials,
            r.param("max_abs_z").unwrap(),
            dt.as_secs_f64()
        ),
    );

    // 3. Linear convergence with data reuse.
    let (conv, dt) = timed(|| simulate(&convergence_config(1)).expect("simulate"));
    let ratio = conv.final_median() / conv.initial_median();
    let c = -tail_log_slope(&conv) * 128.0;
    record(
        &mut log,
        3,
        "linear convergence, finite mode",
        ratio <= 1e-6 && c > 0.0 && dt.as_secs_f64() < 60.0,
        format!(
            "final/initial median {ratio:.3e} (<= 1e-6), tail slope -c/n with c = {c:.4}, {:.2}s (< 60s)",
            dt.as_secs_f64()
        ),
    );

    // 4. One-step rate sandwich at small error.
    let beta0 = solve_beta0(12.0, 1e-3).expect("beta0").beta0;
    let c2 = c2_asymptotic(12.0, beta0).expect("c2");
    let band = (
        lower_bound_rate(12.0, 256) - 2.0 / 256.0,
        1.0 - c2 / (2.0 * 256.0),
    );
    // Informational: the same upper edge with the beta0 -> 0 constant.
    let small_edge = 1.0 - c2_small_error(12.0) / (2.0 * 256.0);
    let (r, dt) =
        timed(|| check_rate_sandwich(256, 12.0, 1e-3, band, 200, 0.05, 11).expect("sandwich"));
    record(
        &mut log,
        4,
        "rate sandwich",
        r.passed() && dt.as_secs_f64() < 60.0,
        format!(
            "{}/{} pools inside ({:.6}, {:.6}) (need >= 95%), ratios in [{:.6}, {:.6}], beta0 {beta0:.3e}, c2 {c2:.4}; max ratio below 1 - c2_small/2n = {:.6}: {}; {:.2}s (< 60s)",
            r.trials - r.violations,
            r.trials,
            band.0,
            band.1,
            r.param("min_ratio").unwrap(),
            r.param("max_ratio").unwrap(),
            small_edge,
            r.param("max_ratio").unwrap() < small_edge,
            dt.as_secs_f64()
        ),
    );

    // 5. Finite vs online gap.
    let (gap, dt) = timed(|| {
        (0..GAP_SEEDS)
            .map(|seed| {
                let f = simulate(&gap_config(ModeTag::Finite, seed, 1)).expect("finite");
                let o = simulate(&gap_config(ModeTag::Online, seed, 1)).expect("online");
                (f, o)
            })
            .collect::<Vec<_>>()
    });
    let ordered = gap
        .iter()
        .filter(|(f, o)| f.final_median() >= o.final_median())
        .count();
    let pairs: Vec<String> = gap
        .iter()
        .map(|(f, o)| format!("{:.1e}/{:.1e}", f.final_median(), o.final_median()))
        .collect();
    record(
        &mut log,
        5,
        "finite slower than online",
        ordered >= 9 && dt.as_secs_f64() < 120.0,
        format!(
            "{ordered}/{GAP_SEEDS} seeds with finite >= online (need >= 9); finite/online medians {}; {:.2}s (< 120s)",
            pairs.join(" "),
            dt.as_secs_f64()
        ),
    );

    // 6. Theory constants through the CLI.
    let (res, dt) = timed(|| {
        (
            kpr(&["bounds", "--alpha", "12", "--n", "256"]),
            kpr(&["bounds", "--alpha", "4", "--n", "256"]),
        )
    });
    let ((code12, out12, _), (code4, out4, err4)) = res;
    let j12: serde_json::Value = serde_json::from_str(&out12).expect("json");
    let j4: serde_json::Value = serde_json::from_str(&out4).expect("json");
    let small = j12["c2_small_err"].as_f64().unwrap();
    let a0 = j12["alpha0"].as_f64().unwrap();
    let lower = j12["lower_rate"].as_f64().unwrap();
    let small4 = j4["c2_small_err"].as_f64().unwrap();
    record(
        &mut log,
        6,
        "theory constants",
        code12 == 0
            && code4 == 0
            && (small - 0.2560).abs() <= 1e-3
            && (a0 - 7.4641).abs() <= 1e-3
            && (lower - 0.993513).abs() <= 1e-5
            && small4 < 0.0
            && err4.contains("warning")
            && dt.as_secs_f64() < 1.0,
        format!(
            "c2_small_err {small:.6}, alpha0 {a0:.6}, lower_rate {lower:.7}, alpha=4 c2_small_err {small4:.4} warned={}, {:.3}s (< 1s)",
            err4.contains("warning"),
            dt.as_secs_f64()
        ),
    );

    // 7. Lemma suites.
    let (reports, dt) = timed(|| {
        [
            Suite::Lemma2,
            Suite::Lemma3,
            Suite::Lemma4,
            Suite::Step,
            Suite::Expectation,
        ]
        .into_iter()
        .flat_map(suite)
        .collect::<Vec<_>>()
    });
    let lemma2_zero = reports
        .iter()
        .filter(|r| r.name == "norm_concentration")
        .all(|r| r.violations == 0 && r.trials == 10_000);
    let t05 = reports
        .iter()
        .find(|r| r.name == "order_stats" && r.param("t") == Some(0.5))
        .and_then(|r| r.limit)
        .map(|l| l.target)
        .unwrap_or(f64::NAN);
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name.as_str())
        .collect();
    for r in &reports {
        emit!("       {r}");
    }
    record(
        &mut log,
        7,
        "lemma suites",
        failed.is_empty() && lemma2_zero && (t05 - 0.1425).abs() < 1e-3 && dt.as_secs_f64() < 120.0,
        format!(
            "{}/{} reports pass, lemma2 zero violations={lemma2_zero}, t=0.5 target {t05:.5}, {:.2}s (< 120s)",
            reports.len() - failed.len(),
            reports.len(),
            dt.as_secs_f64()
        ),
    );

    // 8. Determinism across reruns and worker counts.
    let conv4 = simulate(&convergence_config(4)).expect("simulate");
    let same3 = conv.to_csv_string() == conv4.to_csv_string();
    let same5 = (0..GAP_SEEDS).all(|seed| {
        let (f1, o1) = &gap[seed as usize];
        let f4 = simulate(&gap_config(ModeTag::Finite, seed, 4)).expect("finite");
        let o4 = simulate(&gap_config(ModeTag::Online, seed, 4)).expect("online");
        f1.to_csv_string() == f4.to_csv_string() && o1.to_csv_string() == o4.to_csv_string()
    });
    record(
        &mut log,
        8,
        "determinism",
        same3 && same5,
        format!("criterion 3 CSV identical (1 vs 4 workers): {same3}; criterion 5 CSVs identical: {same5}"),
    );

    let failed: Vec<String> = log
        .iter()
        .filter(|o| !o.pass)
        .map(|o| format!("[{}] {}: {}", o.id, o.title, o.detail))
        .collect();
    emit!("{}/{} criteria passed", log.len() - failed.len(), log.len());
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
