//! Phase retrieval by the randomized Kaczmarz method, in both the reused-pool
//! and the online sampling regimes, together with an engine that evaluates
//! and empirically checks the method's convergence bounds.
//!
//! * [`model`]: Gaussian sensing pools, magnitude measurements, `phase_dist`.
//! * [`spectral`]: power-iteration spectral initialization.
//! * [`kaczmarz`]: the single step, samplers, and the run loop.
//! * [`theory`]: exact index-expectation, `beta0`, contraction constants,
//!   log-domain failure probabilities.
//! * [`checks`]: Monte Carlo verification of the concentration lemmas and the
//!   per-step identities.
//! * [`harness`]: seeded multi-trial experiments, sweeps, CSV/JSON output.
//!
//! See the `examples/` directory for one runnable program per capability.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod error;
pub mod harness;
pub mod kaczmarz;
pub mod model;
pub mod rng;
pub mod spectral;
pub mod theory;

pub use error::{Error, Result};
pub use kaczmarz::{run, sikm_step, ModeTag, RunOptions, RunTrace, SamplingMode};
pub use model::{measure, phase_dist, MeasurementSet, SensingPool, Signal};
pub use spectral::{spectral_init, InitConfig};
