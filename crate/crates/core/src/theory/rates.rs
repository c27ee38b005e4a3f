//! Contraction constants, the rate floor, and the mismatch-ratio bound `beta0`.

use crate::error::{Error, Result};

use super::gaussian::truncated_square_mean_limit;

/// Small-error contraction constant `-3/alpha + (1 - 1/sqrt(alpha))^2`.
pub fn c2_small_error(alpha: f64) -> f64 {
    -3.0 / alpha + (1.0 - 1.0 / alpha.sqrt()).powi(2)
}

/// Positive root of [`c2_small_error`]: `(1 + sqrt(3))^2 = 4 + 2 sqrt(3)`.
pub fn alpha0() -> f64 {
    4.0 + 2.0 * 3f64.sqrt()
}

/// Per-iteration floor `1 - (1 + 1/sqrt(alpha))^2 / n` on the expected
/// squared-error ratio.
pub fn lower_bound_rate(alpha: f64, n: usize) -> f64 {
    1.0 - (1.0 + 1.0 / alpha.sqrt()).powi(2) / n as f64
}

/// `n -> infinity` contraction constant for a mismatch ratio `beta0`.
pub fn c2_asymptotic(alpha: f64, beta0: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if !(beta0 >= 0.0 && beta0 < alpha) {
        return Err(Error::domain(format!(
            "beta0 must lie in [0, alpha) = [0, {alpha}), got {beta0}"
        )));
    }
    if beta0 == 0.0 {
        return Ok(c2_small_error(alpha));
    }
    let rest = alpha - beta0;
    let log_term = (std::f64::consts::E * alpha / beta0).ln();
    let correct =
        (rest / alpha) * (1.0 - 1.0 / rest.sqrt() - (2.0 * beta0 / rest * log_term).sqrt()).powi(2);
    let wrong =
        (3.0 * beta0 / alpha) * (1.0 + 1.0 / beta0.sqrt() + (2.0 * log_term).sqrt()).powi(2);
    Ok(correct - wrong)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Beta0Status {
    /// Bracketed root.
    Root,
    /// The order-statistics side already dominates at the left end: `beta0 = 0`.
    Zero,
    /// The eigenvalue side dominates on the whole interval: `beta0 = alpha`.
    Saturated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beta0 {
    pub beta0: f64,
    pub status: Beta0Status,
    /// `lhs - rhs` of the defining equation at `beta0` (0 for the boundary cases).
    pub residual: f64,
    pub bisections: usize,
}

impl Beta0 {
    /// `beta0 + delta_beta`, capped at `alpha`.
    pub fn padded(&self, alpha: f64, delta_beta: f64) -> f64 {
        (self.beta0 + delta_beta).min(alpha)
    }
}

pub const BETA0_MAX_BISECTIONS: usize = 200;

/// `lhs(beta) - rhs(beta)` of the mismatch-ratio equation, in units of
/// `||x*||^2`, with `rho = ||e|| / ||x*||`.
pub fn beta0_equation(alpha: f64, rho: f64, beta: f64) -> Result<f64> {
    let lhs = truncated_square_mean_limit(beta / alpha)?;
    let root = 1.0 + 1.0 / beta.sqrt() + (2.0 * (std::f64::consts::E * alpha / beta).ln()).sqrt();
    Ok(lhs - root * root * rho * rho)
}

/// Largest mismatch ratio compatible with an error ratio `rho`, found by
/// bisection (the left side increases in `beta`, the right side decreases).
pub fn solve_beta0(alpha: f64, err_ratio: f64) -> Result<Beta0> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if !(err_ratio >= 0.0 && err_ratio.is_finite()) {
        return Err(Error::domain(format!(
            "error ratio must be nonnegative, got {err_ratio}"
        )));
    }
    let mut lo = 1e-12 * alpha;
    let mut hi = alpha * (1.0 - 1e-12);
    let f_lo = beta0_equation(alpha, err_ratio, lo)?;
    if f_lo >= 0.0 {
        return Ok(Beta0 {
            beta0: 0.0,
            status: Beta0Status::Zero,
            residual: 0.0,
            bisections: 0,
        });
    }
    let f_hi = beta0_equation(alpha, err_ratio, hi)?;
    if f_hi <= 0.0 {
        return Ok(Beta0 {
            beta0: alpha,
            status: Beta0Status::Saturated,
            residual: 0.0,
            bisections: 0,
        });
    }
    let mut bisections = 0;
    let mut best = (lo, f_lo);
    while bisections < BETA0_MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        bisections += 1;
        let f = beta0_equation(alpha, err_ratio, mid)?;
        if f.abs() < best.1.abs() {
            best = (mid, f);
        }
        if f == 0.0 {
            break;
        }
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Beta0 {
        beta0: best.0,
        status: Beta0Status::Root,
        residual: best.1,
        bisections,
    })
}
