//! Theory constants for one `(alpha, n, ||e|| / ||x*||)` point.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::theory::probability::{log_eig_failure, log_norm_failure};
use crate::theory::{
    alpha0, c2_asymptotic, c2_small_error, lower_bound_rate, solve_beta0, Beta0Status,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsOptions {
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    /// Finite-`n` padding added to `beta0`.
    pub delta_beta: f64,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        BoundsOptions {
            eps1: 0.5,
            eps2: 0.5,
            eps3: 0.5,
            delta_beta: 0.0,
        }
    }
}

/// Serialized field order is the output schema; do not reorder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryBounds {
    pub alpha: f64,
    pub n: usize,
    pub err_ratio: f64,
    pub beta0: f64,
    /// Absent when `beta0` saturates at `alpha`.
    pub c2_asym: Option<f64>,
    pub c2_small_err: f64,
    pub alpha0: f64,
    /// `1 - c2_asym / n`.
    pub upper_rate: Option<f64>,
    pub lower_rate: f64,
    /// `ln` of the norm, mismatch-set and correct-set failure terms; an
    /// entry is absent when its index set is empty.
    pub log_failure_terms: [Option<f64>; 3],
}

impl TheoryBounds {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Returns the bounds and human-readable warnings about the regime.
pub fn compute_bounds(
    alpha: f64,
    n: usize,
    err_ratio: f64,
    opts: &BoundsOptions,
) -> Result<(TheoryBounds, Vec<String>)> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    if !(opts.delta_beta >= 0.0) {
        return Err(Error::domain("delta_beta must be nonnegative"));
    }
    let solved = solve_beta0(alpha, err_ratio)?;
    let beta0 = solved.padded(alpha, opts.delta_beta);
    let mut warnings = Vec::new();

    let small = c2_small_error(alpha);
    if small <= 0.0 {
        warnings.push(format!(
            "alpha = {alpha} does not exceed alpha0 = {:.4}: the small-error contraction constant is {small:.4} <= 0, so linear convergence is not guaranteed",
            alpha0()
        ));
    }
    let c2_asym = if beta0 < alpha {
        Some(c2_asymptotic(alpha, beta0)?)
    } else {
        warnings.push(format!(
            "error ratio {err_ratio} is too large: beta0 saturates at alpha, no contraction bound"
        ));
        None
    };
    if solved.status == Beta0Status::Root && matches!(c2_asym, Some(c) if c <= 0.0) && small > 0.0 {
        warnings.push(format!(
            "c2_asym = {:.4} <= 0 at error ratio {err_ratio}: the start is not close enough",
            c2_asym.unwrap_or_default()
        ));
    }

    let nf = n as f64;
    let m = alpha * nf;
    let norm = log_norm_failure(m, nf, opts.eps1)?;
    let mismatch = if beta0 > 0.0 && beta0 < alpha {
        Some(log_eig_failure(m, beta0 * nf, opts.eps2)?)
    } else {
        None
    };
    let correct = if beta0 < alpha {
        Some(log_eig_failure(m, (alpha - beta0) * nf, opts.eps3)?)
    } else {
        None
    };

    Ok((
        TheoryBounds {
            alpha,
            n,
            err_ratio,
            beta0,
            c2_asym,
            c2_small_err: small,
            alpha0: alpha0(),
            upper_rate: c2_asym.map(|c| 1.0 - c / nf),
            lower_rate: lower_bound_rate(alpha, n),
            log_failure_terms: [Some(norm), mismatch, correct],
        },
        warnings,
    ))
}
