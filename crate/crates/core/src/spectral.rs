//! Spectral initialization.
//!
//! The initial iterate is `s * v`, where `v` is the unit top eigenvector of
//! `D = (1/m) sum_r y_r^2 a_r a_r^T` found by power iteration and
//! `s = sqrt(mean(y^2))`. `D` is only ever applied to a vector, never formed.

use crate::error::{Error, Result};
use crate::model::{check_len, dot, sq_norm, MeasurementSet, SensingPool, Signal};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitConfig {
    pub max_power_iters: usize,
    /// Stop once `||v_k - v_{k-1}||` drops below this.
    pub tol: f64,
    /// Seed of the power-iteration start vector.
    pub seed: u64,
}

impl Default for InitConfig {
    fn default() -> Self {
        InitConfig {
            max_power_iters: 200,
            tol: 1e-8,
            seed: 0,
        }
    }
}

impl InitConfig {
    pub fn with_seed(seed: u64) -> Self {
        InitConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_power_iters == 0 {
            return Err(Error::Config("max_power_iters must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!(
                "tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SpectralEstimate {
    pub x0: Signal,
    /// Rayleigh quotient of the returned direction.
    pub eigenvalue: f64,
    pub converged: bool,
    pub sweeps: usize,
    /// `||Dv - (v^T D v) v||` of each accepted sweep; never increases.
    pub residuals: Vec<f64>,
}

fn apply_weighted_covariance(pool: &SensingPool, weights: &[f64], v: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (r, a) in pool.rows().enumerate() {
        let c = weights[r] * dot(a, v);
        for (o, ai) in out.iter_mut().zip(a) {
            *o += c * ai;
        }
    }
    let inv_m = 1.0 / pool.m() as f64;
    out.iter_mut().for_each(|o| *o *= inv_m);
}

pub fn spectral_init(
    pool: &SensingPool,
    meas: &MeasurementSet,
    cfg: &InitConfig,
) -> Result<SpectralEstimate> {
    cfg.validate()?;
    check_len(pool.m(), meas.len())?;
    let n = pool.n();
    let weights: Vec<f64> = meas.values().iter().map(|y| y * y).collect();
    let mean_sq = weights.iter().sum::<f64>() / pool.m() as f64;
    if mean_sq <= 0.0 {
        return Err(Error::DegenerateInput("all measurements are zero"));
    }

    let mut v = rng::gaussian_vec(&mut rng::stream(cfg.seed), n);
    normalize(&mut v);
    let mut w = vec![0.0; n];

    let mut best = v.clone();
    let mut best_lambda = 0.0;
    let mut best_res = f64::INFINITY;
    let mut residuals = Vec::new();
    let mut converged = false;
    let mut sweeps = 0;

    loop {
        apply_weighted_covariance(pool, &weights, &v, &mut w);
        let lambda = dot(&v, &w);
        let res = w
            .iter()
            .zip(&v)
            .map(|(wi, vi)| (wi - lambda * vi).powi(2))
            .sum::<f64>()
            .sqrt();
        if res <= best_res {
            best_res = res;
            best_lambda = lambda;
            best.copy_from_slice(&v);
            residuals.push(res);
        }
        if converged || sweeps == cfg.max_power_iters {
            break;
        }
        let norm_w = sq_norm(&w).sqrt();
        if norm_w == 0.0 {
            return Err(Error::DegenerateInput(
                "start vector lies in the null space",
            ));
        }
        let mut change = 0.0;
        for (vi, wi) in v.iter_mut().zip(&w) {
            let next = wi / norm_w;
            change += (next - *vi).powi(2);
            *vi = next;
        }
        sweeps += 1;
        converged = change.sqrt() < cfg.tol;
    }

    let scale = mean_sq.sqrt();
    best.iter_mut().for_each(|b| *b *= scale);
    Ok(SpectralEstimate {
        x0: Signal::new(best)?,
        eigenvalue: best_lambda,
        converged,
        sweeps,
        residuals,
    })
}

fn normalize(v: &mut [f64]) {
    let norm = sq_norm(v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    } else if let Some(first) = v.first_mut() {
        *first = 1.0;
    }
}
