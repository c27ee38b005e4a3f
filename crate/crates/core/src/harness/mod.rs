//! Seeded multi-trial experiments and the artifacts the `kpr` binary emits.
//!
//! Trial `i` of an experiment draws everything from
//! `trial_seed = derive_seed(master_seed, i)`: the ground truth from
//! `derive_seed(trial_seed, 0)`, the pool from `derive_seed(trial_seed, 1)`,
//! the power-iteration start from `derive_seed(trial_seed, 2)`, finite-mode
//! index choices from `derive_seed(trial_seed, 3)` and online sensing vectors
//! from `derive_seed(trial_seed, 4)`. Finite and online runs of the same
//! configuration therefore share the truth, the pool and the starting point.

mod bounds;
mod config;
mod summary;
mod verify;

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

pub use bounds::{compute_bounds, BoundsOptions, TheoryBounds};
pub use config::{pool_size, ExperimentConfig, InitKind, Suite};
pub use summary::{quantile_sorted, RunMetadata, RunSummary, CSV_HEADER};
pub use verify::{run_suite, VerifyParams};

use crate::error::{Error, Result};
use crate::kaczmarz::{run, ModeTag, RunOptions, RunTrace, SamplingMode};
use crate::model::{measure, SensingPool, Signal};
use crate::rng::derive_seed;
use crate::spectral::{spectral_init, InitConfig};

pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// One trial's trace plus whether its spectral start converged.
fn run_trial(cfg: &ExperimentConfig, index: usize) -> Result<(RunTrace, bool)> {
    let ts = derive_seed(cfg.master_seed, index as u64);
    let x_star = match &cfg.signal {
        Some(s) => s.clone(),
        None => Signal::random_unit(cfg.n, derive_seed(ts, 0))?,
    };
    let needs_pool = cfg.mode == ModeTag::Finite || cfg.init == InitKind::Spectral;
    let data = if needs_pool {
        let pool = SensingPool::generate(cfg.n, cfg.m, derive_seed(ts, 1))?;
        let meas = measure(&pool, &x_star)?;
        Some((pool, meas))
    } else {
        None
    };
    let mut converged = true;
    let x0 = match &cfg.init {
        InitKind::Zero => Signal::zeros(cfg.n)?,
        InitKind::Given(x0) => x0.clone(),
        InitKind::Spectral => {
            let (pool, meas) = data.as_ref().expect("pool exists for spectral init");
            let est = spectral_init(pool, meas, &InitConfig::with_seed(derive_seed(ts, 2)))?;
            converged = est.converged;
            est.x0
        }
    };
    let mode = match (cfg.mode, &data) {
        (ModeTag::Finite, Some((pool, meas))) => SamplingMode::Finite {
            pool,
            measurements: meas,
        },
        _ => SamplingMode::Online {
            x_star: &x_star,
            seed: derive_seed(ts, 4),
        },
    };
    let opts = RunOptions {
        trace_stride: cfg.trace_stride,
        ..RunOptions::default()
    };
    let trace = run(
        &x0,
        &x_star,
        &mode,
        cfg.iterations,
        derive_seed(ts, 3),
        &opts,
    )?;
    Ok((trace, converged))
}

fn with_workers<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {w} workers: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Runs `cfg.trials` independent seeded trials and aggregates their traces.
pub fn simulate(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let start = Instant::now();
    let results: Vec<(RunTrace, bool)> = with_workers(cfg.workers, || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| run_trial(cfg, i))
            .collect::<Result<Vec<_>>>()
    })??;
    let nonconverged = results.iter().filter(|(_, ok)| !ok).count();
    let traces: Vec<RunTrace> = results.into_iter().map(|(t, _)| t).collect();
    let metadata = RunMetadata {
        n: cfg.n,
        m: cfg.m,
        alpha: cfg.alpha(),
        mode: cfg.mode,
        iterations: cfg.iterations,
        trials: cfg.trials,
        master_seed: cfg.master_seed,
        init: cfg.init.label().to_string(),
        trace_stride: cfg.trace_stride,
        nonconverged_inits: nonconverged,
        wall_time_secs: start.elapsed().as_secs_f64(),
        version: VERSION.to_string(),
    };
    Ok(RunSummary::from_traces(&traces, metadata))
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub alpha: f64,
    pub mode: ModeTag,
    pub summary: RunSummary,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
}

impl SweepReport {
    pub fn final_medians(&self, mode: ModeTag) -> Vec<(f64, f64)> {
        self.entries
            .iter()
            .filter(|e| e.mode == mode)
            .map(|e| (e.alpha, e.summary.final_median()))
            .collect()
    }

    /// Final median error strictly decreases as alpha grows (entries are in
    /// the order the alphas were given).
    pub fn strictly_decreasing(&self, mode: ModeTag) -> bool {
        let mut pairs = self.final_medians(mode);
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs.windows(2).all(|w| w[1].1 < w[0].1)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        for (i, e) in self.entries.iter().enumerate() {
            e.summary.write_csv(out, Some((e.alpha, e.mode)), i == 0)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii csv")
    }
}

/// Runs `base` at every alpha in `alphas`, first in finite then in online
/// mode. `base.m` is replaced by `round(alpha n)`.
pub fn sweep(alphas: &[f64], base: &ExperimentConfig) -> Result<SweepReport> {
    if alphas.is_empty() {
        return Err(Error::Config("alpha list must not be empty".into()));
    }
    if let Some(bad) = alphas.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(Error::Config(format!("alpha must be positive, got {bad}")));
    }
    let mut entries = Vec::with_capacity(2 * alphas.len());
    for &alpha in alphas {
        for mode in [ModeTag::Finite, ModeTag::Online] {
            let cfg = ExperimentConfig {
                m: pool_size(alpha, base.n),
                mode,
                ..base.clone()
            };
            entries.push(SweepEntry {
                alpha,
                mode,
                summary: simulate(&cfg)?,
            });
        }
    }
    Ok(SweepReport { entries })
}

/// Reads a signal stored as consecutive little-endian `f64` values.
pub fn read_signal_file(path: &Path, n: usize) -> Result<Signal> {
    let bytes = fs::read(path)?;
    if bytes.len() != 8 * n {
        return Err(Error::Config(format!(
            "{} holds {} bytes, expected {} ({} little-endian f64 values)",
            path.display(),
            bytes.len(),
            8 * n,
            n
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Signal::new(values)
}

pub fn write_signal_file(path: &Path, signal: &Signal) -> Result<()> {
    let bytes: Vec<u8> = signal.iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(path, bytes)?;
    Ok(())
}
