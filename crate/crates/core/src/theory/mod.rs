//! Analytical side of the convergence argument.
//!
//! The central object is the expectation of the next squared error over the
//! uniformly drawn row index, with the pool and the current iterate held
//! fixed. It is a finite average over the `m` rows, so it is computed by
//! enumeration and needs no assumption about how the iterate depends on the
//! sensing vectors.

pub mod gaussian;
pub mod probability;
pub mod rates;

pub use gaussian::{central_mass, q_function, tau_from_mass, truncated_square_mean_limit};
pub use probability::{failure_probability_terms, ln_binomial, FailureTerms};
pub use rates::{
    alpha0, c2_asymptotic, c2_small_error, lower_bound_rate, solve_beta0, Beta0, Beta0Status,
};

use crate::error::Result;
use crate::kaczmarz::sgn;
use crate::model::{check_len, dot, MeasurementSet, SensingPool, Signal};

/// Rows whose sign estimate disagrees with the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct MismatchReport {
    pub indices: Vec<usize>,
    /// `|S| / n`.
    pub beta: f64,
    /// Every `k in S` has `|a_k^T x*| <= |a_k^T e|` with `e = x - x*`.
    pub subset_ok: bool,
    /// Rows of `S` where that inequality holds with equality.
    pub ties: usize,
}

pub fn mismatch_set(pool: &SensingPool, x_star: &Signal, x: &Signal) -> Result<MismatchReport> {
    check_len(pool.n(), x_star.dim())?;
    check_len(pool.n(), x.dim())?;
    let mut indices = Vec::new();
    let mut subset_ok = true;
    let mut ties = 0;
    for (k, a) in pool.rows().enumerate() {
        let axs = dot(a, x_star);
        let ax = dot(a, x);
        if sgn(axs) != sgn(ax) {
            indices.push(k);
            let ae = (ax - axs).abs();
            if axs.abs() > ae {
                subset_ok = false;
            } else if axs.abs() == ae {
                ties += 1;
            }
        }
    }
    Ok(MismatchReport {
        beta: indices.len() as f64 / pool.n() as f64,
        indices,
        subset_ok,
        ties,
    })
}

/// Exact `E_r ||x_t - x*||^2` given `x_{t-1} = x_prev`:
/// `||e||^2 - (1/m) sum_k (a_k^T e)^2/||a_k||^2 + (1/m) sum_k y_k^2 b_k^2/||a_k||^2`
/// with `b_k = sgn(a_k^T x*) sgn(a_k^T x_prev) - 1`.
pub fn expected_step_sq_error(
    pool: &SensingPool,
    meas: &MeasurementSet,
    x_star: &Signal,
    x_prev: &Signal,
) -> Result<f64> {
    check_len(pool.m(), meas.len())?;
    check_len(pool.n(), x_star.dim())?;
    check_len(pool.n(), x_prev.dim())?;
    let e_sq: f64 = x_prev
        .iter()
        .zip(x_star.iter())
        .map(|(p, s)| (p - s) * (p - s))
        .sum();
    let mut projected = 0.0;
    let mut flipped = 0.0;
    for (k, a) in pool.rows().enumerate() {
        let axs = dot(a, x_star);
        let ax = dot(a, x_prev);
        let ae = ax - axs;
        let b = sgn(axs) * sgn(ax) - 1.0;
        let y = meas.values()[k];
        projected += ae * ae / pool.sq_norm(k);
        flipped += y * y * b * b / pool.sq_norm(k);
    }
    let m = pool.m() as f64;
    Ok(e_sq - projected / m + flipped / m)
}

/// The same expectation split by the mismatch set `S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDecomposition {
    pub e_sq: f64,
    /// `(1/m) sum_{k not in S} (a_k^T e)^2 / ||a_k||^2`
    pub correct_term: f64,
    /// `(1/m) sum_{k in S} (4 (a_k^T x*)^2 - (a_k^T e)^2) / ||a_k||^2`
    pub mismatch_term: f64,
    pub mismatches: usize,
}

impl StepDecomposition {
    pub fn value(&self) -> f64 {
        self.e_sq - self.correct_term + self.mismatch_term
    }
}

pub fn decompose_step_expectation(
    pool: &SensingPool,
    x_star: &Signal,
    x_prev: &Signal,
) -> Result<StepDecomposition> {
    check_len(pool.n(), x_star.dim())?;
    check_len(pool.n(), x_prev.dim())?;
    let e_sq: f64 = x_prev
        .iter()
        .zip(x_star.iter())
        .map(|(p, s)| (p - s) * (p - s))
        .sum();
    let (mut correct, mut wrong, mut mismatches) = (0.0, 0.0, 0);
    for (k, a) in pool.rows().enumerate() {
        let axs = dot(a, x_star);
        let ax = dot(a, x_prev);
        let ae = ax - axs;
        if sgn(axs) == sgn(ax) {
            correct += ae * ae / pool.sq_norm(k);
        } else {
            mismatches += 1;
            wrong += (4.0 * axs * axs - ae * ae) / pool.sq_norm(k);
        }
    }
    let m = pool.m() as f64;
    Ok(StepDecomposition {
        e_sq,
        correct_term: correct / m,
        mismatch_term: wrong / m,
        mismatches,
    })
}
