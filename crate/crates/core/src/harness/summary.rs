//! Cross-trial aggregation and the CSV trace format.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::kaczmarz::{ModeTag, RunTrace};

pub const CSV_HEADER: &str = "iter,t_norm,mean_sq_dist,median_sq_dist,p10_sq_dist,p90_sq_dist";

/// Linear-interpolation quantile of sorted data (`q` in `[0, 1]`).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub mode: ModeTag,
    pub iterations: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub init: String,
    pub trace_stride: usize,
    pub nonconverged_inits: usize,
    pub wall_time_secs: f64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub iters: Vec<usize>,
    pub mean: Vec<f64>,
    pub median: Vec<f64>,
    pub p10: Vec<f64>,
    pub p90: Vec<f64>,
    /// Final squared distance of each trial, in trial order.
    pub final_sq_dist: Vec<f64>,
    pub metadata: RunMetadata,
}

impl RunSummary {
    /// Aggregates traces that share the same recording grid.
    pub fn from_traces(traces: &[RunTrace], metadata: RunMetadata) -> Self {
        let iters = traces[0].iters.clone();
        let len = iters.len();
        let mut summary = RunSummary {
            iters,
            mean: Vec::with_capacity(len),
            median: Vec::with_capacity(len),
            p10: Vec::with_capacity(len),
            p90: Vec::with_capacity(len),
            final_sq_dist: traces.iter().map(RunTrace::final_sq_dist).collect(),
            metadata,
        };
        let mut column = Vec::with_capacity(traces.len());
        for j in 0..len {
            column.clear();
            column.extend(traces.iter().map(|t| t.sq_dist[j]));
            summary
                .mean
                .push(column.iter().sum::<f64>() / column.len() as f64);
            column.sort_by(f64::total_cmp);
            summary.median.push(quantile_sorted(&column, 0.5));
            summary.p10.push(quantile_sorted(&column, 0.1));
            summary.p90.push(quantile_sorted(&column, 0.9));
        }
        summary
    }

    pub fn final_median(&self) -> f64 {
        *self.median.last().expect("nonempty summary")
    }

    pub fn initial_median(&self) -> f64 {
        self.median[0]
    }

    /// Writes the CSV rows, optionally prefixed by `alpha,mode` columns.
    pub fn write_csv<W: Write>(
        &self,
        out: &mut W,
        prefix: Option<(f64, ModeTag)>,
        header: bool,
    ) -> Result<()> {
        if header {
            match prefix {
                Some(_) => writeln!(out, "alpha,mode,{CSV_HEADER}")?,
                None => writeln!(out, "{CSV_HEADER}")?,
            }
        }
        let n = self.metadata.n as f64;
        for j in 0..self.iters.len() {
            if let Some((alpha, mode)) = prefix {
                write!(out, "{alpha},{mode},")?;
            }
            writeln!(
                out,
                "{},{},{},{},{},{}",
                self.iters[j],
                self.iters[j] as f64 / n,
                self.mean[j],
                self.median[j],
                self.p10[j],
                self.p90[j]
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, None, true)
            .expect("writing to memory");
        String::from_utf8(buf).expect("ascii csv")
    }
}
