//! Real Gaussian phase-retrieval model: signals, sensing pools, magnitude
//! measurements and the sign-invariant error metric.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::rng;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn sq_norm(a: &[f64]) -> f64 {
    dot(a, a)
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

/// A real signal of dimension `n >= 1` with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal(Vec<f64>);

impl Signal {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyDimension { n: 0, m: 1 });
        }
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Signal(entries))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Signal::new(vec![0.0; n])
    }

    /// Standard Gaussian signal rescaled to unit norm.
    pub fn random_unit(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDimension { n, m: 1 });
        }
        let mut rng = rng::stream(seed);
        loop {
            let mut v = rng::gaussian_vec(&mut rng, n);
            let norm = sq_norm(&v).sqrt();
            if norm > 0.0 {
                v.iter_mut().for_each(|x| *x /= norm);
                return Signal::new(v);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        sq_norm(&self.0).sqrt()
    }

    pub fn scaled(&self, c: f64) -> Signal {
        Signal(self.0.iter().map(|v| c * v).collect())
    }

    pub fn neg(&self) -> Signal {
        Signal(self.0.iter().map(|v| -v).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Signal {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `m` sensing vectors of dimension `n`, stored row-major, with their squared
/// norms cached at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingPool {
    rows: Vec<f64>,
    sq_norms: Vec<f64>,
    n: usize,
    m: usize,
    seed: Option<u64>,
}

impl SensingPool {
    /// Draws `m * n` i.i.d. standard normal entries row by row from the stream
    /// seeded by `seed`.
    pub fn generate(n: usize, m: usize, seed: u64) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::EmptyDimension { n, m });
        }
        let mut rng = rng::stream(seed);
        let rows = rng::gaussian_vec(&mut rng, m * n);
        let mut pool = Self::build(rows, n, m)?;
        pool.seed = Some(seed);
        Ok(pool)
    }

    /// Builds a pool from explicit sensing vectors (all of equal length).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if n == 0 || m == 0 {
            return Err(Error::EmptyDimension { n, m });
        }
        let mut flat = Vec::with_capacity(m * n);
        for row in rows {
            check_len(n, row.len())?;
            flat.extend_from_slice(row);
        }
        Self::build(flat, n, m)
    }

    fn build(rows: Vec<f64>, n: usize, m: usize) -> Result<Self> {
        let sq_norms: Vec<f64> = rows.chunks_exact(n).map(sq_norm).collect();
        if let Some(&bad) = sq_norms.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::DegenerateRow(bad));
        }
        Ok(SensingPool {
            rows,
            sq_norms,
            n,
            m,
            seed: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Sampling rate `m / n`.
    pub fn alpha(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.rows[r * self.n..(r + 1) * self.n]
    }

    #[inline]
    pub fn sq_norm(&self, r: usize) -> f64 {
        self.sq_norms[r]
    }

    pub fn sq_norms(&self) -> &[f64] {
        &self.sq_norms
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.rows.chunks_exact(self.n)
    }

    /// Keeps only the rows listed in `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyDimension { n: self.n, m: 0 });
        }
        let mut rows = Vec::with_capacity(indices.len() * self.n);
        let mut sq_norms = Vec::with_capacity(indices.len());
        for &r in indices {
            if r >= self.m {
                return Err(Error::domain(format!(
                    "row index {r} out of range for m = {}",
                    self.m
                )));
            }
            rows.extend_from_slice(self.row(r));
            sq_norms.push(self.sq_norms[r]);
        }
        Ok(SensingPool {
            rows,
            sq_norms,
            n: self.n,
            m: indices.len(),
            seed: None,
        })
    }
}

/// Magnitudes `y_r = |<a_r, x*>|`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    values: Vec<f64>,
}

impl MeasurementSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::domain(format!(
                "measurement {index} must be finite and nonnegative"
            )));
        }
        Ok(MeasurementSet { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        MeasurementSet::new(self.values.iter().map(|v| c * v).collect())
    }
}

pub fn measure(pool: &SensingPool, x_star: &Signal) -> Result<MeasurementSet> {
    check_len(pool.n(), x_star.dim())?;
    let values = pool.rows().map(|a| dot(a, x_star).abs()).collect();
    Ok(MeasurementSet { values })
}

/// `min(||x - x*||, ||x + x*||)`.
pub fn phase_dist(x: &[f64], x_star: &[f64]) -> Result<f64> {
    check_len(x_star.len(), x.len())?;
    Ok(phase_sq_dist_unchecked(x, x_star).sqrt())
}

pub(crate) fn phase_sq_dist_unchecked(x: &[f64], x_star: &[f64]) -> f64 {
    let (mut minus, mut plus) = (0.0, 0.0);
    for (a, b) in x.iter().zip(x_star) {
        minus += (a - b) * (a - b);
        plus += (a + b) * (a + b);
    }
    minus.min(plus)
}
