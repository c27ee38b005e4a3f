use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kaczmarz::ModeTag;
use crate::model::Signal;

#[derive(Debug, Clone, PartialEq)]
pub enum InitKind {
    Spectral,
    Zero,
    Given(Signal),
}

impl InitKind {
    pub fn label(&self) -> &'static str {
        match self {
            InitKind::Spectral => "spectral",
            InitKind::Zero => "zero",
            InitKind::Given(_) => "given",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m: usize,
    pub mode: ModeTag,
    pub iterations: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub init: InitKind,
    /// Fixed ground truth for every trial; a fresh unit-norm Gaussian signal
    /// per trial when absent.
    pub signal: Option<Signal>,
    pub trace_stride: usize,
    /// Worker threads; `None` uses the global pool. Never affects output.
    pub workers: Option<usize>,
}

/// `m = round(alpha n)`.
pub fn pool_size(alpha: f64, n: usize) -> usize {
    (alpha * n as f64).round() as usize
}

impl ExperimentConfig {
    /// Defaults: `T = 40 n`, one trial, seed 0, spectral init, stride 1.
    pub fn new(n: usize, alpha: f64, mode: ModeTag) -> Self {
        ExperimentConfig {
            n,
            m: pool_size(alpha, n),
            mode,
            iterations: 40 * n,
            trials: 1,
            master_seed: 0,
            init: InitKind::Spectral,
            signal: None,
            trace_stride: 1,
            workers: None,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    pub fn trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn stride(mut self, stride: usize) -> Self {
        self.trace_stride = stride;
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.m == 0 {
            return bad(format!(
                "pool size m = round(alpha n) must be positive (n = {})",
                self.n
            ));
        }
        if self.iterations == 0 {
            return bad("iteration count must be positive".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.trace_stride == 0 {
            return bad("trace stride must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        if let InitKind::Given(x0) = &self.init {
            if x0.dim() != self.n {
                return bad(format!(
                    "initial point has dimension {}, expected {}",
                    x0.dim(),
                    self.n
                ));
            }
        }
        if let Some(s) = &self.signal {
            if s.dim() != self.n {
                return bad(format!(
                    "signal has dimension {}, expected {}",
                    s.dim(),
                    self.n
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemma2,
    Lemma3,
    Lemma4,
    Step,
    Expectation,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lemma2" => Suite::Lemma2,
            "lemma3" => Suite::Lemma3,
            "lemma4" => Suite::Lemma4,
            "step" => Suite::Step,
            "expectation" => Suite::Expectation,
            "all" => Suite::All,
            other => return Err(Error::Config(format!("unknown suite `{other}`"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Lemma2 => "lemma2",
            Suite::Lemma3 => "lemma3",
            Suite::Lemma4 => "lemma4",
            Suite::Step => "step",
            Suite::Expectation => "expectation",
            Suite::All => "all",
        })
    }
}
