//! Standard-normal helpers used by the mismatch-ratio analysis.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use statrs::function::erf::{erf, erf_inv, erfc};

use crate::error::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Upper tail `Q(tau) = P(Z > tau)`.
pub fn q_function(tau: f64) -> f64 {
    0.5 * erfc(tau * FRAC_1_SQRT_2)
}

/// Central mass `P(|Z| < tau) = 1 - 2 Q(tau)`.
pub fn central_mass(tau: f64) -> f64 {
    if tau <= 0.0 {
        0.0
    } else {
        erf(tau * FRAC_1_SQRT_2)
    }
}

/// Inverse of [`central_mass`]: the `tau >= 0` with `1 - 2Q(tau) = t`.
pub fn tau_from_mass(t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::domain(format!("mass must lie in (0, 1), got {t}")));
    }
    // erf_inv is accurate to a few ulps; safeguarded Newton polishes it.
    let mut tau = SQRT_2 * erf_inv(t);
    if !tau.is_finite() || tau < 0.0 {
        tau = 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, 40.0f64);
    for _ in 0..100 {
        let f = central_mass(tau) - t;
        if f.abs() < 1e-15 {
            break;
        }
        if f > 0.0 {
            hi = hi.min(tau);
        } else {
            lo = lo.max(tau);
        }
        let step = f / (2.0 * pdf(tau));
        let next = tau - step;
        tau = if next > lo && next < hi && next.is_finite() {
            next
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-300 {
            break;
        }
    }
    Ok(tau)
}

/// `int_{-tau}^{tau} x^2 phi(x) dx`.
pub fn truncated_second_moment(tau: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    if tau < 0.5 {
        // 2 phi(0) sum_k (-1)^k tau^(2k+3) / (2^k k! (2k+3))
        let t2 = tau * tau;
        let mut term = tau * t2;
        let mut sum = 0.0;
        for k in 0..40 {
            let contrib = term / (2 * k + 3) as f64;
            sum += contrib;
            if contrib.abs() < 1e-18 * sum.abs() {
                break;
            }
            term *= -t2 / (2.0 * (k + 1) as f64);
        }
        2.0 * INV_SQRT_2PI * sum
    } else {
        central_mass(tau) - 2.0 * tau * pdf(tau)
    }
}

/// Limit of the mean of the smallest `t m` squared standard Gaussians as
/// `m -> infinity`: `1 - (1/t) (2 tau / sqrt(2 pi)) exp(-tau^2 / 2)` with
/// `1 - 2Q(tau) = t`.
pub fn truncated_square_mean_limit(t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::domain(format!("t must lie in (0, 1], got {t}")));
    }
    if t == 1.0 {
        return Ok(1.0);
    }
    let tau = tau_from_mass(t)?;
    Ok(truncated_second_moment(tau) / t)
}

/// Closed form as written, without the small-`tau` series. Kept for
/// cross-checking [`truncated_square_mean_limit`].
pub fn truncated_square_mean_closed_form(t: f64) -> Result<f64> {
    if t == 1.0 {
        return Ok(1.0);
    }
    let tau = tau_from_mass(t)?;
    Ok(1.0 - (1.0 / t) * (2.0 * tau / (2.0 * PI).sqrt()) * (-tau * tau / 2.0).exp())
}
