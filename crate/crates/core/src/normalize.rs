//! Per-row z-score normalization of channel-subtrial data.
//!
//! Each row (one channel's epoch) is shifted and scaled independently to
//! zero mean and unit population variance, which is the classifier input
//! unit. The per-row statistics are returned for audit.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dataset::ChannelSubtrialDataset;
use crate::error::{Error, Result};

/// Per-row mean and standard deviation removed by [`zscore_normalize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

/// Normalizes every row to mean 0 and population variance 1.
///
/// A row whose variance is (numerically) zero cannot be scaled and is
/// reported as [`Error::DegenerateRow`].
pub fn zscore_normalize(ds: &ChannelSubtrialDataset) -> Result<(ChannelSubtrialDataset, NormStats)> {
    let x = ds.x();
    let (n, d) = (x.nrows(), x.ncols());
    let mut out = Array2::<f64>::zeros((n, d));
    let mut means = Vec::with_capacity(n);
    let mut stds = Vec::with_capacity(n);
    for i in 0..n {
        let row = x.row(i);
        let mean = row.sum() / d as f64;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / d as f64;
        let mean_sq = row.iter().map(|v| v * v).sum::<f64>() / d as f64;
        if var <= 1e-24 * mean_sq.max(f64::MIN_POSITIVE) {
            return Err(Error::DegenerateRow(format!(
                "row {i} has zero variance (mean {mean})"
            )));
        }
        let std = var.sqrt();
        for (j, v) in row.iter().enumerate() {
            out[(i, j)] = (v - mean) / std;
        }
        means.push(mean);
        stds.push(std);
    }
    Ok((ds.with_x(out)?, NormStats { means, stds }))
}

/// Z-scores each channel of a continuous recording over its whole length.
///
/// This is the recording-level alternative to per-row normalization: scale
/// statistics come from the entire recording, matching pipelines that
/// normalize before slicing.
pub fn zscore_recording(rec: &crate::dataset::Recording) -> Result<crate::dataset::Recording> {
    let mut out = rec.samples().clone();
    let n_t = rec.n_timepoints() as f64;
    for ch in 0..rec.n_channels() {
        let mean = rec.channel(ch).sum() / n_t;
        let var = rec
            .channel(ch)
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / n_t;
        let mean_sq = rec.channel(ch).iter().map(|v| v * v).sum::<f64>() / n_t;
        if var <= 1e-24 * mean_sq.max(f64::MIN_POSITIVE) {
            return Err(Error::DegenerateRow(format!("channel {ch} is constant")));
        }
        let std = var.sqrt();
        for t in 0..rec.n_timepoints() {
            out[(ch, t)] = (out[(ch, t)] - mean) / std;
        }
    }
    rec.with_samples(out)
}
