//! Log-domain bookkeeping for the failure probability of the contraction
//! bound: one norm-concentration term and two union bounds over index sets.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// `ln C(m, k)` through log-gamma; `k` may be fractional.
pub fn ln_binomial(m: f64, k: f64) -> Result<f64> {
    if !(m >= 0.0 && k >= 0.0 && k <= m) {
        return Err(Error::domain(format!("ln C({m}, {k}) needs 0 <= k <= m")));
    }
    if k == 0.0 || k == m {
        return Ok(0.0);
    }
    Ok(ln_gamma(m + 1.0) - ln_gamma(k + 1.0) - ln_gamma(m - k + 1.0))
}

/// `ln(2m) - n (eps^2/4 - eps^3/6)`: a union over `m` rows of the two-sided
/// chi-square tail.
pub fn log_norm_failure(m: f64, n: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::domain(format!("eps1 must lie in (0, 1], got {eps}")));
    }
    Ok((2.0 * m).ln() - n * chi_square_exponent(eps))
}

/// `eps^2/4 - eps^3/6`.
pub fn chi_square_exponent(eps: f64) -> f64 {
    eps * eps / 4.0 - eps.powi(3) / 6.0
}

/// `ln C(m, p) - p eps^2 / 2`: extreme-eigenvalue failure over all `p`-subsets.
pub fn log_eig_failure(m: f64, p: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::domain(format!("eps must be positive, got {eps}")));
    }
    Ok(ln_binomial(m, p)? - p * eps * eps / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureTerms {
    /// Row-norm concentration over all `m` rows.
    pub norm: f64,
    /// `lambda_max` over mismatch sets of size `beta0 n`, via log-gamma.
    pub mismatch: f64,
    /// Same, with `C(m, k) <= (e alpha / beta0)^(beta0 n)`.
    pub mismatch_relaxed: f64,
    /// `lambda_min` over correct sets of size `(alpha - beta0) n`.
    pub correct: f64,
    pub correct_relaxed: f64,
}

impl FailureTerms {
    pub fn exact(&self) -> [f64; 3] {
        [self.norm, self.mismatch, self.correct]
    }

    pub fn relaxed(&self) -> [f64; 3] {
        [self.norm, self.mismatch_relaxed, self.correct_relaxed]
    }

    /// `ln` of the summed failure probability.
    pub fn log_total(&self) -> f64 {
        log_sum_exp(&self.exact())
    }

    /// Total failure probability, when representable without overflow.
    pub fn total(&self) -> Option<f64> {
        let l = self.log_total();
        (l.abs() < 700.0).then(|| l.exp())
    }
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

pub fn failure_probability_terms(
    alpha: f64,
    n: usize,
    beta0: f64,
    eps1: f64,
    eps2: f64,
    eps3: f64,
) -> Result<FailureTerms> {
    if !(alpha > 0.0) || n == 0 {
        return Err(Error::domain("alpha and n must be positive"));
    }
    if !(beta0 > 0.0 && beta0 < alpha) {
        return Err(Error::domain(format!(
            "beta0 must lie in (0, {alpha}), got {beta0}"
        )));
    }
    if !(eps2 > 0.0 && eps3 > 0.0) {
        return Err(Error::domain("eps2 and eps3 must be positive"));
    }
    let nf = n as f64;
    let m = alpha * nf;
    let wrong = beta0 * nf;
    let right = (alpha - beta0) * nf;
    let relax = wrong * (std::f64::consts::E * alpha / beta0).ln();
    Ok(FailureTerms {
        norm: log_norm_failure(m, nf, eps1)?,
        mismatch: log_eig_failure(m, wrong, eps2)?,
        mismatch_relaxed: relax - wrong * eps2 * eps2 / 2.0,
        correct: log_eig_failure(m, right, eps3)?,
        correct_relaxed: relax - right * eps3 * eps3 / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ln_binomial_by_product(m: u64, k: u64) -> f64 {
        (0..k).map(|i| ((m - i) as f64 / (i + 1) as f64).ln()).sum()
    }

    #[test]
    fn ln_binomial_matches_products() {
        for (m, k) in [
            (10, 3),
            (52, 5),
            (1000, 17),
            (4000, 2000),
            (96, 0),
            (96, 96),
        ] {
            let a = ln_binomial(m as f64, k as f64).unwrap();
            let b = ln_binomial_by_product(m, k);
            assert!(
                (a - b).abs() <= 1e-9 * (1.0 + b.abs()),
                "C({m},{k}): {a} vs {b}"
            );
        }
        assert!(ln_binomial(5.0, 6.0).is_err());
    }

    #[test]
    fn unit_eps_first_term() {
        let t = failure_probability_terms(8.0, 100, 0.5, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(t.norm, (1600f64).ln() - 100.0 / 12.0, max_relative = 1e-12);
        // eps1 -> 0 leaves ln(2m) > 0: the bound is vacuous.
        let v = log_norm_failure(800.0, 100.0, 1e-9).unwrap();
        assert_relative_eq!(v, 1600f64.ln(), max_relative = 1e-12);
        assert!(log_norm_failure(800.0, 100.0, 0.0).is_err());
    }

    #[test]
    fn relaxation_dominates_log_gamma() {
        for &alpha in &[2.0, 6.0, 12.0, 40.0] {
            for &frac in &[0.01, 0.1, 0.3, 0.5, 0.9] {
                let beta0 = frac * alpha;
                for &n in &[16usize, 256, 10_000, 1_000_000] {
                    let t = failure_probability_terms(alpha, n, beta0, 0.5, 1.0, 1.0).unwrap();
                    assert!(t.mismatch <= t.mismatch_relaxed + 1e-9 * t.mismatch_relaxed.abs());
                    assert!(t.correct <= t.correct_relaxed + 1e-9 * t.correct_relaxed.abs());
                    assert!(t.log_total().is_finite());
                }
            }
        }
    }

    #[test]
    fn huge_dimension_stays_in_log_space() {
        let t = failure_probability_terms(12.0, 1_000_000, 0.01, 0.5, 2.0, 0.5).unwrap();
        assert!(t.norm < -1e4);
        assert!(t.total().is_none() || t.total().unwrap() < 1e-300);
    }

    #[test]
    fn domain_checks() {
        assert!(failure_probability_terms(12.0, 256, 0.0, 0.5, 1.0, 1.0).is_err());
        assert!(failure_probability_terms(12.0, 256, 12.0, 0.5, 1.0, 1.0).is_err());
        assert!(failure_probability_terms(12.0, 256, 1.0, 1.5, 1.0, 1.0).is_err());
        assert!(failure_probability_terms(12.0, 256, 1.0, 0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn log_sum_exp_basics() {
        assert_relative_eq!(log_sum_exp(&[0.0, 0.0]), 2f64.ln());
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert_relative_eq!(log_sum_exp(&[-1000.0, -1000.0]), -1000.0 + 2f64.ln());
    }
}
