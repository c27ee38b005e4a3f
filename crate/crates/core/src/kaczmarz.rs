//! Randomized Kaczmarz iteration for real phase retrieval.
//!
//! One step projects the iterate onto the hyperplane
//! `<a, x> = y * sgn(<a, x_prev>)`, using the current iterate to guess the
//! missing sign. Samples come either from a fixed pool that is reused across
//! iterations ([`SamplingMode::Finite`]) or from a fresh Gaussian vector per
//! iteration ([`SamplingMode::Online`]).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    check_len, dot, phase_sq_dist_unchecked, sq_norm, MeasurementSet, SensingPool, Signal,
};
use crate::rng::{self, StreamRng};

/// Sign with `sgn(0) = +1`.
#[inline]
pub fn sgn(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// In-place single Kaczmarz step. Returns `<a, x_prev>`.
#[inline]
pub fn sikm_step_in_place(x: &mut [f64], a: &[f64], sq_norm_a: f64, y: f64) -> Result<f64> {
    if !(sq_norm_a > 0.0) {
        return Err(Error::DegenerateRow(sq_norm_a));
    }
    if !(y >= 0.0) {
        return Err(Error::domain(format!(
            "measurement must be nonnegative, got {y}"
        )));
    }
    check_len(x.len(), a.len())?;
    let ax = dot(a, x);
    let coef = (y * sgn(ax) - ax) / sq_norm_a;
    for (xi, ai) in x.iter_mut().zip(a) {
        *xi += coef * ai;
    }
    Ok(ax)
}

pub fn sikm_step(x_prev: &Signal, a: &[f64], sq_norm_a: f64, y: f64) -> Result<Signal> {
    let mut x = x_prev.to_vec();
    sikm_step_in_place(&mut x, a, sq_norm_a, y)?;
    Signal::new(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeTag {
    Finite,
    Online,
}

impl fmt::Display for ModeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeTag::Finite => "finite",
            ModeTag::Online => "online",
        })
    }
}

impl FromStr for ModeTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "finite" => Ok(ModeTag::Finite),
            "online" => Ok(ModeTag::Online),
            other => Err(Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum SamplingMode<'a> {
    /// Uniform draws with replacement from a fixed pool.
    Finite {
        pool: &'a SensingPool,
        measurements: &'a MeasurementSet,
    },
    /// A fresh `N(0, I)` vector per iteration, drawn from the stream seeded by
    /// `seed` exactly as [`SensingPool::generate`] would lay out its rows.
    Online { x_star: &'a Signal, seed: u64 },
}

impl SamplingMode<'_> {
    pub fn tag(&self) -> ModeTag {
        match self {
            SamplingMode::Finite { .. } => ModeTag::Finite,
            SamplingMode::Online { .. } => ModeTag::Online,
        }
    }

    fn dim(&self) -> usize {
        match self {
            SamplingMode::Finite { pool, .. } => pool.n(),
            SamplingMode::Online { x_star, .. } => x_star.dim(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Sample<'s> {
    pub a: &'s [f64],
    pub sq_norm: f64,
    pub y: f64,
    /// Pool index, finite mode only.
    pub index: Option<usize>,
}

/// Source of `(a, ||a||^2, y)` triples for the run loop.
pub trait SampleSource {
    fn next_sample(&mut self) -> Result<Sample<'_>>;
}

pub struct Sampler<'a> {
    inner: SamplerInner<'a>,
}

enum SamplerInner<'a> {
    Finite {
        pool: &'a SensingPool,
        values: &'a [f64],
        rng: StreamRng,
    },
    Online {
        x_star: &'a Signal,
        rng: StreamRng,
        buf: Vec<f64>,
    },
}

impl<'a> Sampler<'a> {
    /// `seed` drives index selection in finite mode; online mode uses the
    /// seed carried by the mode itself.
    pub fn new(mode: &SamplingMode<'a>, seed: u64) -> Result<Self> {
        let inner = match *mode {
            SamplingMode::Finite { pool, measurements } => {
                check_len(pool.m(), measurements.len())?;
                SamplerInner::Finite {
                    pool,
                    values: measurements.values(),
                    rng: rng::stream(seed),
                }
            }
            SamplingMode::Online { x_star, seed } => SamplerInner::Online {
                x_star,
                rng: rng::stream(seed),
                buf: vec![0.0; x_star.dim()],
            },
        };
        Ok(Sampler { inner })
    }
}

impl SampleSource for Sampler<'_> {
    fn next_sample(&mut self) -> Result<Sample<'_>> {
        match &mut self.inner {
            SamplerInner::Finite { pool, values, rng } => {
                let r = rng.random_range(0..pool.m());
                Ok(Sample {
                    a: pool.row(r),
                    sq_norm: pool.sq_norm(r),
                    y: values[r],
                    index: Some(r),
                })
            }
            SamplerInner::Online { x_star, rng, buf } => {
                rng::fill_gaussian(rng, buf);
                Ok(Sample {
                    sq_norm: sq_norm(buf),
                    y: dot(buf, x_star).abs(),
                    a: buf,
                    index: None,
                })
            }
        }
    }
}

/// Replays a fixed index sequence over a pool.
pub struct IndexedSource<'a> {
    pool: &'a SensingPool,
    values: &'a [f64],
    indices: std::slice::Iter<'a, usize>,
}

impl<'a> IndexedSource<'a> {
    pub fn new(
        pool: &'a SensingPool,
        meas: &'a MeasurementSet,
        indices: &'a [usize],
    ) -> Result<Self> {
        check_len(pool.m(), meas.len())?;
        if let Some(&bad) = indices.iter().find(|&&r| r >= pool.m()) {
            return Err(Error::domain(format!(
                "index {bad} out of range for m = {}",
                pool.m()
            )));
        }
        Ok(IndexedSource {
            pool,
            values: meas.values(),
            indices: indices.iter(),
        })
    }
}

impl SampleSource for IndexedSource<'_> {
    fn next_sample(&mut self) -> Result<Sample<'_>> {
        let &r = self
            .indices
            .next()
            .ok_or_else(|| Error::domain("index sequence exhausted"))?;
        Ok(Sample {
            a: self.pool.row(r),
            sq_norm: self.pool.sq_norm(r),
            y: self.values[r],
            index: Some(r),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Record every `trace_stride`-th iterate (plus the last one).
    pub trace_stride: usize,
    /// Recompute the squared-error recursion on every step.
    pub audit: bool,
    pub record_indices: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            trace_stride: 1,
            audit: false,
            record_indices: false,
        }
    }
}

/// Outcome of auditing the per-step squared-error recursion.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AuditSummary {
    pub steps: usize,
    pub max_rel_error: f64,
    pub violations: usize,
}

pub const AUDIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    /// Iteration numbers at which `sq_dist` was recorded.
    pub iters: Vec<usize>,
    /// `phase_dist^2(x_t, x*)` at each recorded iteration.
    pub sq_dist: Vec<f64>,
    pub iterations: usize,
    pub seed: u64,
    pub mode: ModeTag,
    pub chosen_indices: Option<Vec<usize>>,
    pub audit: Option<AuditSummary>,
    pub final_iterate: Signal,
}

impl RunTrace {
    pub fn final_sq_dist(&self) -> f64 {
        *self
            .sq_dist
            .last()
            .expect("trace always holds the initial point")
    }
}

/// Number of recorded points for a run of `iterations` steps.
pub fn trace_len(iterations: usize, stride: usize) -> usize {
    iterations.div_ceil(stride) + 1
}

pub fn run(
    x0: &Signal,
    x_star: &Signal,
    mode: &SamplingMode<'_>,
    iterations: usize,
    seed: u64,
    opts: &RunOptions,
) -> Result<RunTrace> {
    check_len(mode.dim(), x0.dim())?;
    let mut sampler = Sampler::new(mode, seed)?;
    drive(x0, x_star, &mut sampler, iterations, seed, mode.tag(), opts)
}

/// Finite-mode run over an explicit index sequence (one step per entry).
pub fn run_with_indices(
    x0: &Signal,
    x_star: &Signal,
    pool: &SensingPool,
    meas: &MeasurementSet,
    indices: &[usize],
    opts: &RunOptions,
) -> Result<RunTrace> {
    check_len(pool.n(), x0.dim())?;
    let mut source = IndexedSource::new(pool, meas, indices)?;
    drive(
        x0,
        x_star,
        &mut source,
        indices.len(),
        0,
        ModeTag::Finite,
        opts,
    )
}

/// Runs `iterations` steps drawing from any sample source.
pub fn drive<S: SampleSource>(
    x0: &Signal,
    x_star: &Signal,
    source: &mut S,
    iterations: usize,
    seed: u64,
    mode: ModeTag,
    opts: &RunOptions,
) -> Result<RunTrace> {
    if iterations == 0 {
        return Err(Error::Config("iteration count must be at least 1".into()));
    }
    if opts.trace_stride == 0 {
        return Err(Error::Config("trace stride must be at least 1".into()));
    }
    check_len(x_star.dim(), x0.dim())?;

    let mut x = x0.to_vec();
    let cap = trace_len(iterations, opts.trace_stride);
    let mut iters = Vec::with_capacity(cap);
    let mut sq_dist = Vec::with_capacity(cap);
    iters.push(0);
    sq_dist.push(phase_sq_dist_unchecked(&x, x_star));
    let mut chosen = opts.record_indices.then(|| Vec::with_capacity(iterations));
    let mut audit = opts.audit.then(AuditSummary::default);

    for t in 1..=iterations {
        let sample = source.next_sample()?;
        let pre = audit.map(|_| predict_sq_error(&x, x_star, &sample));
        sikm_step_in_place(&mut x, sample.a, sample.sq_norm, sample.y)?;
        if let (Some(summary), Some((branch, predicted, scale))) = (audit.as_mut(), pre) {
            let actual: f64 = x
                .iter()
                .zip(x_star.iter())
                .map(|(xi, si)| (xi - branch * si).powi(2))
                .sum();
            let rel = (predicted - actual).abs() / scale;
            summary.steps += 1;
            summary.max_rel_error = summary.max_rel_error.max(rel);
            if rel > AUDIT_TOL {
                summary.violations += 1;
            }
        }
        if let (Some(list), Some(r)) = (chosen.as_mut(), sample.index) {
            list.push(r);
        }
        if t % opts.trace_stride == 0 || t == iterations {
            iters.push(t);
            sq_dist.push(phase_sq_dist_unchecked(&x, x_star));
        }
    }

    Ok(RunTrace {
        iters,
        sq_dist,
        iterations,
        seed,
        mode,
        chosen_indices: chosen,
        audit,
        final_iterate: Signal::new(x)?,
    })
}

/// Predicted `||e_t||^2` from the recursion
/// `||e||^2 - (a^T e)^2/||a||^2 + (a^T z)^2 b^2 / ||a||^2`, with `z = ±x*`
/// the closer target and `b = sgn(a^T z) sgn(a^T x) - 1`.
/// Returns `(branch sign, prediction, normalising scale)`. The scale is
/// `max(||e||^2, ||e|| ||x*||)`: the updated iterate is only known to about
/// `eps ||x*||` per coordinate, so `||e_t||^2` cannot be resolved more finely
/// than `eps ||e|| ||x*||`.
fn predict_sq_error(x: &[f64], x_star: &[f64], s: &Sample<'_>) -> (f64, f64, f64) {
    let (mut minus, mut plus) = (0.0, 0.0);
    for (a, b) in x.iter().zip(x_star) {
        minus += (a - b) * (a - b);
        plus += (a + b) * (a + b);
    }
    let branch = if minus <= plus { 1.0 } else { -1.0 };
    let e_sq = minus.min(plus);
    let ax = dot(s.a, x);
    let az = branch * dot(s.a, x_star);
    let ae = ax - az;
    let b = sgn(az) * sgn(ax) - 1.0;
    let predicted = e_sq - ae * ae / s.sq_norm + az * az * b * b / s.sq_norm;
    let star_sq = sq_norm(x_star);
    let scale = e_sq
        .max((e_sq * star_sq).sqrt())
        .max(f64::EPSILON * star_sq)
        .max(f64::MIN_POSITIVE);
    (branch, predicted, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::measure;
    use approx::assert_relative_eq;

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec()).unwrap()
    }

    #[test]
    fn fixed_point_at_truth() {
        let a = [0.4, -1.3, 2.2];
        let xs = sig(&[1.0, 0.5, -0.25]);
        let y = dot(&a, &xs).abs();
        let next = sikm_step(&xs, &a, sq_norm(&a), y).unwrap();
        for (p, q) in next.iter().zip(xs.iter()) {
            assert_relative_eq!(p, q, max_relative = 1e-14);
        }
    }

    #[test]
    fn wrong_sign_projects_onto_negative_hyperplane() {
        let next = sikm_step(&sig(&[-0.5, 2.0]), &[1.0, 0.0], 1.0, 1.0).unwrap();
        assert_eq!(next.as_slice(), &[-1.0, 2.0]);
    }

    #[test]
    fn correct_sign_is_linear_projection() {
        let xs = sig(&[1.0, 1.0]);
        let prev = sig(&[2.0, 0.0]);
        let next = sikm_step(&prev, &[1.0, 0.0], 1.0, 1.0).unwrap();
        assert_eq!(next.as_slice(), &[1.0, 0.0]);
        assert_relative_eq!(crate::model::phase_dist(&prev, &xs).unwrap(), 2f64.sqrt());
        assert_relative_eq!(crate::model::phase_dist(&next, &xs).unwrap(), 1.0);
    }

    #[test]
    fn step_rejects_degenerate_row() {
        let err = sikm_step(&sig(&[1.0]), &[0.0], 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateRow(_)));
    }

    #[test]
    fn hand_run_with_forced_indices() {
        let pool = SensingPool::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let xs = sig(&[1.0, 1.0]);
        let meas = measure(&pool, &xs).unwrap();
        let trace = run_with_indices(
            &Signal::zeros(2).unwrap(),
            &xs,
            &pool,
            &meas,
            &[0, 1],
            &RunOptions::default(),
        )
        .unwrap();
        assert_eq!(trace.sq_dist, vec![2.0, 1.0, 0.0]);
        assert_eq!(trace.final_iterate.as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn single_row_pool_always_returns_it() {
        let pool = SensingPool::from_rows(&[vec![0.3, 0.7]]).unwrap();
        let meas = MeasurementSet::new(vec![0.9]).unwrap();
        let mode = SamplingMode::Finite {
            pool: &pool,
            measurements: &meas,
        };
        let mut s = Sampler::new(&mode, 4).unwrap();
        for _ in 0..20 {
            let sample = s.next_sample().unwrap();
            assert_eq!(sample.index, Some(0));
            assert_eq!(sample.y, 0.9);
        }
    }

    #[test]
    fn finite_index_frequencies_pass_chi_square() {
        let pool = SensingPool::generate(3, 4, 1).unwrap();
        let meas = MeasurementSet::new(vec![1.0; 4]).unwrap();
        let mode = SamplingMode::Finite {
            pool: &pool,
            measurements: &meas,
        };
        let mut s = Sampler::new(&mode, 77).unwrap();
        let draws = 1_000_000usize;
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            counts[s.next_sample().unwrap().index.unwrap()] += 1;
        }
        let expected = draws as f64 / 4.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // chi-square(3) upper 1e-3 point
        assert!(chi2 < 16.266, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn online_stream_is_reproducible() {
        let xs = Signal::random_unit(5, 1).unwrap();
        let mode = SamplingMode::Online {
            x_star: &xs,
            seed: 42,
        };
        let take = |k: usize| {
            let mut s = Sampler::new(&mode, 0).unwrap();
            let mut out = Vec::new();
            for _ in 0..k {
                out.push(s.next_sample().unwrap().a.to_vec());
            }
            out
        };
        assert_eq!(take(10), take(10));
    }

    #[test]
    fn stride_controls_trace_length() {
        let pool = SensingPool::generate(6, 30, 2).unwrap();
        let xs = Signal::random_unit(6, 3).unwrap();
        let meas = measure(&pool, &xs).unwrap();
        let mode = SamplingMode::Finite {
            pool: &pool,
            measurements: &meas,
        };
        let opts = RunOptions {
            trace_stride: 7,
            ..RunOptions::default()
        };
        let trace = run(&Signal::zeros(6).unwrap(), &xs, &mode, 50, 1, &opts).unwrap();
        assert_eq!(trace.sq_dist.len(), trace_len(50, 7));
        assert_eq!(trace.iters, vec![0, 7, 14, 21, 28, 35, 42, 49, 50]);
        let full = run(
            &Signal::zeros(6).unwrap(),
            &xs,
            &mode,
            50,
            1,
            &RunOptions::default(),
        )
        .unwrap();
        assert_eq!(full.sq_dist.len(), 51);
        assert_eq!(full.sq_dist[49], trace.sq_dist[7]);
        assert_eq!(full.final_sq_dist(), trace.final_sq_dist());
    }

    #[test]
    fn zero_iterations_rejected() {
        let xs = Signal::random_unit(3, 3).unwrap();
        let mode = SamplingMode::Online {
            x_star: &xs,
            seed: 1,
        };
        assert!(run(&xs, &xs, &mode, 0, 0, &RunOptions::default()).is_err());
    }
}
