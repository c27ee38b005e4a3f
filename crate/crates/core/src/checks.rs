//! Monte Carlo verification of the concentration lemmas and of the exact
//! per-step identities.
//!
//! Bound-type reports pass iff the empirical violation rate is at most the
//! theoretical failure probability plus a one-sided `3 sigma` Monte Carlo
//! slack; a vacuous bound (probability >= 1) always passes. Every trial draws
//! from its own stream `derive_seed(seed, trial)`, so reports do not depend on
//! the number of worker threads.

use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kaczmarz::{sgn, sikm_step_in_place};
use crate::model::{dot, measure, sq_norm, SensingPool, Signal};
use crate::rng::{self, derive_seed};
use crate::theory::{
    decompose_step_expectation, expected_step_sq_error, mismatch_set, truncated_square_mean_limit,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

/// Comparison of a Monte Carlo average against a limiting value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitCheck {
    pub empirical: f64,
    pub target: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub name: String,
    pub trials: usize,
    pub violations: usize,
    /// `ln` of the theoretical failure probability per trial
    /// (`-inf` for exact identities).
    pub log_failure_bound: f64,
    pub empirical_rate: f64,
    pub verdict: Verdict,
    pub params: Vec<(&'static str, f64)>,
    pub limit: Option<LimitCheck>,
}

impl LemmaReport {
    fn from_bound(
        name: &str,
        trials: usize,
        violations: usize,
        log_failure_bound: f64,
        params: Vec<(&'static str, f64)>,
    ) -> Self {
        let rate = violations as f64 / trials as f64;
        LemmaReport {
            name: name.to_string(),
            trials,
            violations,
            log_failure_bound,
            empirical_rate: rate,
            verdict: bound_verdict(rate, log_failure_bound, trials),
            params,
            limit: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| *k == key).map(|&(_, v)| v)
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<22} trials={:<7} violations={:<6} rate={:<10.3e} ln_bound={:<10.4}",
            self.verdict.to_string(),
            self.name,
            self.trials,
            self.violations,
            self.empirical_rate,
            self.log_failure_bound,
        )?;
        if let Some(l) = &self.limit {
            write!(
                f,
                " empirical={:.6} target={:.6} tol={:.2e}",
                l.empirical, l.target, l.tolerance
            )?;
        }
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        write!(f, " [{}]", params.join(" "))
    }
}

/// Pass iff `rate <= exp(log_bound) + 3 sqrt(rate (1 - rate) / trials)`;
/// vacuous bounds (`log_bound >= 0`) always pass and exact identities
/// (`log_bound = -inf`) tolerate no violation.
pub fn bound_verdict(rate: f64, log_bound: f64, trials: usize) -> Verdict {
    if log_bound >= 0.0 {
        return Verdict::Pass;
    }
    if log_bound == f64::NEG_INFINITY {
        return Verdict::from_bool(rate == 0.0);
    }
    let slack = 3.0 * (rate * (1.0 - rate) / trials as f64).sqrt();
    Verdict::from_bool(rate <= log_bound.exp() + slack)
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}

/// Two-sided row-norm concentration: counts `| ||a||^2/n - 1 | >= eps` against
/// `2 exp(-n (eps^2/4 - eps^3/6))`.
pub fn check_norm_concentration(
    n: usize,
    trials: usize,
    eps: f64,
    seed: u64,
) -> Result<LemmaReport> {
    require(n >= 1 && trials >= 1, || {
        "n and trials must be positive".into()
    })?;
    require(eps > 0.0 && eps < 1.0, || {
        format!("eps must lie in (0, 1), got {eps}")
    })?;
    let violations = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let a = rng::gaussian_vec(&mut rng::stream(derive_seed(seed, i as u64)), n);
            (sq_norm(&a) / n as f64 - 1.0).abs() >= eps
        })
        .count();
    let nf = n as f64;
    let log_bound = 2f64.ln() - nf * (eps * eps / 4.0 - eps.powi(3) / 6.0);
    Ok(LemmaReport::from_bound(
        "norm_concentration",
        trials,
        violations,
        log_bound,
        vec![("n", nf), ("eps", eps)],
    ))
}

/// Extreme eigenvalues of `(1/p) A A^T` for an `n x p` standard Gaussian `A`,
/// from the singular values of `A`. Returns `(lambda_min, lambda_max)` where
/// `lambda_min` is that of the Gram matrix (0 when `p < n`).
pub fn gram_extreme_eigs(n: usize, p: usize, seed: u64) -> (f64, f64) {
    let data = rng::gaussian_vec(&mut rng::stream(seed), n * p);
    let a = DMatrix::from_vec(n, p, data);
    let s = a.singular_values();
    let s_max = s.iter().copied().fold(0.0, f64::max);
    let s_min = if p >= n {
        s.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        0.0
    };
    (s_min * s_min / p as f64, s_max * s_max / p as f64)
}

/// Reports for `lambda_max <= (1 + sqrt(n/p) + eps)^2` and
/// `lambda_min >= (1 - sqrt(n/p) - eps)^2`, each against `exp(-p eps^2 / 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalEigReports {
    pub max: LemmaReport,
    pub min: LemmaReport,
}

pub fn check_extremal_eigs(
    n: usize,
    p: usize,
    trials: usize,
    eps: f64,
    seed: u64,
) -> Result<ExtremalEigReports> {
    require(n >= 1 && trials >= 1, || {
        "n and trials must be positive".into()
    })?;
    require(p >= n, || {
        format!("the lambda_min check needs p >= n (p = {p}, n = {n})")
    })?;
    require(eps > 0.0, || format!("eps must be positive, got {eps}"))?;
    let ratio = (n as f64 / p as f64).sqrt();
    let upper = (1.0 + ratio + eps).powi(2);
    let lower_root = 1.0 - ratio - eps;
    let lower = lower_root.max(0.0).powi(2);
    let eigs: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| gram_extreme_eigs(n, p, derive_seed(seed, i as u64)))
        .collect();
    let max_viol = eigs.iter().filter(|(_, hi)| *hi > upper).count();
    let min_viol = eigs.iter().filter(|(lo, _)| *lo < lower).count();
    let log_bound = -(p as f64) * eps * eps / 2.0;
    let params = vec![("n", n as f64), ("p", p as f64), ("eps", eps)];
    let max = LemmaReport::from_bound("lambda_max", trials, max_viol, log_bound, params.clone());
    // With 1 - sqrt(n/p) - eps <= 0 the singular-value statement says nothing
    // about lambda_min.
    let min_log_bound = if lower_root <= 0.0 { 0.0 } else { log_bound };
    let min = LemmaReport::from_bound("lambda_min", trials, min_viol, min_log_bound, params);
    Ok(ExtremalEigReports { max, min })
}

/// Mean of the smallest `floor(t m)` of `m` squared standard Gaussians,
/// averaged over trials, against its `m -> infinity` limit.
///
/// The band is `3 sigma_hat / sqrt(trials) + 3 / m` (Monte Carlo spread of the
/// trial average plus a finite-`m` bias allowance); with a single trial it
/// falls back to `3 / sqrt(m) + 3 / sqrt(trials)`.
pub fn check_order_stats(m: usize, t: f64, trials: usize, seed: u64) -> Result<LemmaReport> {
    require(m >= 10, || format!("m must be at least 10, got {m}"))?;
    require(trials >= 1, || "trials must be positive".into())?;
    require(t > 0.0 && t <= 1.0, || {
        format!("t must lie in (0, 1], got {t}")
    })?;
    let k = ((t * m as f64).floor() as usize).max(1);
    let means: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut sq = rng::gaussian_vec(&mut rng::stream(derive_seed(seed, i as u64)), m);
            sq.iter_mut().for_each(|v| *v *= *v);
            if k < m {
                sq.select_nth_unstable_by(k - 1, |a, b| a.total_cmp(b));
            }
            sq[..k].iter().sum::<f64>() / k as f64
        })
        .collect();
    let tf = trials as f64;
    let empirical = means.iter().sum::<f64>() / tf;
    let target = truncated_square_mean_limit(t)?;
    let tolerance = if trials >= 2 {
        let var = means.iter().map(|v| (v - empirical).powi(2)).sum::<f64>() / (tf - 1.0);
        3.0 * (var / tf).sqrt() + 3.0 / m as f64
    } else {
        3.0 / (m as f64).sqrt() + 3.0 / tf.sqrt()
    };
    let ok = (empirical - target).abs() <= tolerance;
    Ok(LemmaReport {
        name: "order_stats".into(),
        trials,
        violations: usize::from(!ok),
        log_failure_bound: f64::NEG_INFINITY,
        empirical_rate: if ok { 0.0 } else { 1.0 },
        verdict: Verdict::from_bool(ok),
        params: vec![("m", m as f64), ("t", t)],
        limit: Some(LimitCheck {
            empirical,
            target,
            tolerance,
        }),
    })
}

pub const IDENTITY_TOL: f64 = 1e-9;

/// Starting point for identity trial `i`: the truth, its negation, or a
/// random perturbation of random size.
fn identity_trial_start(i: usize, x_star: &Signal, rng: &mut rng::StreamRng) -> Signal {
    match i % 10 {
        0 => x_star.clone(),
        1 => x_star.neg(),
        _ => {
            let scale: f64 = rng.random_range(0.0..2.0);
            let g = rng::gaussian_vec(rng, x_star.dim());
            let v = x_star.iter().zip(&g).map(|(s, z)| s + scale * z).collect();
            Signal::new(v).expect("finite perturbation")
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct IdentityTally {
    steps: usize,
    step_violations: usize,
    subset_violations: usize,
    expectation_violations: usize,
    max_rel_error: f64,
}

fn identity_trial(n: usize, m: usize, trial_seed: u64, i: usize) -> Result<IdentityTally> {
    let pool = SensingPool::generate(n, m, derive_seed(trial_seed, 0))?;
    let x_star = Signal::random_unit(n, derive_seed(trial_seed, 1))?;
    let meas = measure(&pool, &x_star)?;
    let mut rng = rng::stream(derive_seed(trial_seed, 2));
    let x_prev = identity_trial_start(i, &x_star, &mut rng);

    let e_sq: f64 = x_prev
        .iter()
        .zip(x_star.iter())
        .map(|(p, s)| (p - s).powi(2))
        .sum();
    let scale = e_sq
        .max(f64::EPSILON * sq_norm(&x_star))
        .max(f64::MIN_POSITIVE);
    let mut tally = IdentityTally::default();
    let mut outcome_sum = 0.0;
    let mut x = vec![0.0; n];
    for k in 0..m {
        let a = pool.row(k);
        let y = meas.values()[k];
        x.copy_from_slice(&x_prev);
        let ax = sikm_step_in_place(&mut x, a, pool.sq_norm(k), y)?;
        let direct: f64 = x
            .iter()
            .zip(x_star.iter())
            .map(|(p, s)| (p - s).powi(2))
            .sum();
        let axs = dot(a, &x_star);
        let ae = ax - axs;
        let b = sgn(axs) * sgn(ax) - 1.0;
        let predicted = e_sq - ae * ae / pool.sq_norm(k) + axs * axs * b * b / pool.sq_norm(k);
        let rel = (predicted - direct).abs() / scale;
        tally.steps += 1;
        tally.max_rel_error = tally.max_rel_error.max(rel);
        if rel > IDENTITY_TOL {
            tally.step_violations += 1;
        }
        outcome_sum += direct;
    }
    if !mismatch_set(&pool, &x_star, &x_prev)?.subset_ok {
        tally.subset_violations += 1;
    }
    let exact = expected_step_sq_error(&pool, &meas, &x_star, &x_prev)?;
    let split = decompose_step_expectation(&pool, &x_star, &x_prev)?.value();
    let mean = outcome_sum / m as f64;
    if (exact - mean).abs() > IDENTITY_TOL * scale || (exact - split).abs() > IDENTITY_TOL * scale {
        tally.expectation_violations += 1;
    }
    Ok(tally)
}

/// Exact per-step identities on random instances: the squared-error
/// recursion for every row, the mismatch-subset condition, and agreement of
/// the enumerated expectation (both forms) with the mean of actual steps.
pub fn check_step_identities(
    n: usize,
    alpha: f64,
    trials: usize,
    seed: u64,
) -> Result<LemmaReport> {
    require(n >= 2, || format!("n must be at least 2, got {n}"))?;
    require(trials >= 1, || "trials must be positive".into())?;
    require(alpha > 0.0, || {
        format!("alpha must be positive, got {alpha}")
    })?;
    let m = ((alpha * n as f64).round() as usize).max(1);
    let tallies: Vec<IdentityTally> = (0..trials)
        .into_par_iter()
        .map(|i| identity_trial(n, m, derive_seed(seed, i as u64), i))
        .collect::<Result<_>>()?;
    let mut total = IdentityTally::default();
    for t in &tallies {
        total.steps += t.steps;
        total.step_violations += t.step_violations;
        total.subset_violations += t.subset_violations;
        total.expectation_violations += t.expectation_violations;
        total.max_rel_error = total.max_rel_error.max(t.max_rel_error);
    }
    let violations = total.step_violations + total.subset_violations + total.expectation_violations;
    Ok(LemmaReport::from_bound(
        "step_identities",
        trials,
        violations,
        f64::NEG_INFINITY,
        vec![
            ("n", n as f64),
            ("m", m as f64),
            ("steps", total.steps as f64),
            ("step_violations", total.step_violations as f64),
            ("subset_violations", total.subset_violations as f64),
            (
                "expectation_violations",
                total.expectation_violations as f64,
            ),
            ("max_rel_error", total.max_rel_error),
        ],
    ))
}

/// Per-instance result of the expectation oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationSample {
    pub exact: f64,
    pub mc_mean: f64,
    pub std_error: f64,
}

impl ExpectationSample {
    pub fn z_score(&self) -> f64 {
        (self.mc_mean - self.exact) / self.std_error
    }
}

/// Draws `draws` independent single steps from a fixed `x_prev` with
/// uniformly random row index and compares their mean squared error with
/// the enumerated expectation.
pub fn expectation_instance(
    n: usize,
    m: usize,
    draws: usize,
    seed: u64,
    spread: f64,
) -> Result<ExpectationSample> {
    let pool = SensingPool::generate(n, m, derive_seed(seed, 0))?;
    let x_star = Signal::random_unit(n, derive_seed(seed, 1))?;
    let meas = measure(&pool, &x_star)?;
    let g = rng::gaussian_vec(&mut rng::stream(derive_seed(seed, 2)), n);
    let x_prev = Signal::new(x_star.iter().zip(&g).map(|(s, z)| s + spread * z).collect())?;
    let exact = expected_step_sq_error(&pool, &meas, &x_star, &x_prev)?;

    let mut rng = rng::stream(derive_seed(seed, 3));
    let mut x = vec![0.0; n];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..draws {
        let r = rng.random_range(0..m);
        x.copy_from_slice(&x_prev);
        sikm_step_in_place(&mut x, pool.row(r), pool.sq_norm(r), meas.values()[r])?;
        let d: f64 = x
            .iter()
            .zip(x_star.iter())
            .map(|(p, s)| (p - s).powi(2))
            .sum();
        sum += d;
        sum_sq += d * d;
    }
    let df = draws as f64;
    let mc_mean = sum / df;
    let var = ((sum_sq - df * mc_mean * mc_mean) / (df - 1.0)).max(0.0);
    Ok(ExpectationSample {
        exact,
        mc_mean,
        std_error: (var / df).sqrt().max(f64::MIN_POSITIVE),
    })
}

pub const EXPECTATION_Z: f64 = 4.0;

/// Monte Carlo oracle for the enumerated one-step expectation over
/// `instances` random instances; an instance violates when its Monte Carlo
/// mean sits more than 4 standard errors from the exact value.
pub fn check_expectation_oracle(
    n: usize,
    m: usize,
    instances: usize,
    draws: usize,
    seed: u64,
) -> Result<LemmaReport> {
    require(n >= 1 && m >= 1 && instances >= 1, || {
        "n, m, instances must be positive".into()
    })?;
    require(draws >= 2, || "need at least two draws".into())?;
    let samples: Vec<ExpectationSample> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let spread = 0.1 + 0.9 * (i % 10) as f64 / 9.0;
            expectation_instance(n, m, draws, derive_seed(seed, i as u64), spread)
        })
        .collect::<Result<_>>()?;
    let violations = samples
        .iter()
        .filter(|s| s.z_score().abs() > EXPECTATION_Z)
        .count();
    let max_z = samples
        .iter()
        .map(|s| s.z_score().abs())
        .fold(0.0, f64::max);
    // P(|Z| > 4) for a standard normal.
    let log_bound = (2.0 * crate::theory::q_function(EXPECTATION_Z)).ln();
    Ok(LemmaReport::from_bound(
        "expectation_oracle",
        instances,
        violations,
        log_bound,
        vec![
            ("n", n as f64),
            ("m", m as f64),
            ("draws", draws as f64),
            ("max_abs_z", max_z),
        ],
    ))
}

/// Exact one-step contraction ratio `E||e_next||^2 / ||e||^2` at
/// `x_prev = x* + err ||x*|| u` with `u` a uniform random unit direction.
pub fn one_step_ratio(n: usize, m: usize, err: f64, seed: u64) -> Result<f64> {
    let pool = SensingPool::generate(n, m, derive_seed(seed, 0))?;
    let x_star = Signal::random_unit(n, derive_seed(seed, 1))?;
    let meas = measure(&pool, &x_star)?;
    let u = Signal::random_unit(n, derive_seed(seed, 2))?;
    let step = err * x_star.norm();
    let x_prev = Signal::new(
        x_star
            .iter()
            .zip(u.iter())
            .map(|(s, d)| s + step * d)
            .collect(),
    )?;
    let e_sq: f64 = x_prev
        .iter()
        .zip(x_star.iter())
        .map(|(p, s)| (p - s).powi(2))
        .sum();
    Ok(expected_step_sq_error(&pool, &meas, &x_star, &x_prev)? / e_sq)
}

/// Counts pools whose exact one-step ratio falls outside `(lower, upper)`.
/// `log_failure_bound` is `ln(allowed_rate)`, the fraction of pools allowed
/// outside the band.
pub fn check_rate_sandwich(
    n: usize,
    alpha: f64,
    err: f64,
    band: (f64, f64),
    pools: usize,
    allowed_rate: f64,
    seed: u64,
) -> Result<LemmaReport> {
    require(n >= 2 && pools >= 1, || {
        "n >= 2 and pools >= 1 required".into()
    })?;
    require(err > 0.0, || format!("err must be positive, got {err}"))?;
    require(alpha > 0.0, || {
        format!("alpha must be positive, got {alpha}")
    })?;
    let m = ((alpha * n as f64).round() as usize).max(1);
    let ratios: Vec<f64> = (0..pools)
        .into_par_iter()
        .map(|i| one_step_ratio(n, m, err, derive_seed(seed, i as u64)))
        .collect::<Result<_>>()?;
    let (lower, upper) = band;
    let violations = ratios
        .iter()
        .filter(|&&r| !(r > lower && r < upper))
        .count();
    let rate = violations as f64 / pools as f64;
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(LemmaReport {
        name: "rate_sandwich".to_string(),
        trials: pools,
        violations,
        log_failure_bound: allowed_rate.ln(),
        empirical_rate: rate,
        verdict: Verdict::from_bool(rate <= allowed_rate),
        params: vec![
            ("n", n as f64),
            ("m", m as f64),
            ("lower", lower),
            ("upper", upper),
            ("min_ratio", lo),
            ("max_ratio", hi),
        ],
        limit: None,
    })
}
