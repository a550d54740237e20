//! Ensemble statistics with worker-count-independent reductions.
//!
//! Accumulators keep per-bin `(count, sum, sum-of-squares)`. Merging two
//! accumulators adds those triples componentwise, which is exactly
//! commutative in IEEE arithmetic, and the parallel driver always combines
//! chunk results in ascending chunk order, so a run is bitwise reproducible
//! for any worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("bin count mismatch: accumulator has {expected}, sample has {got}")]
    BinMismatch { expected: usize, got: usize },
}

/// Per-bin running statistics of an ensemble of profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleAccumulator {
    labels: Vec<f64>,
    count: Vec<u64>,
    sum: Vec<f64>,
    sumsq: Vec<f64>,
}

impl EnsembleAccumulator {
    /// Accumulator over bins identified by `labels` (angles or indices).
    pub fn new(labels: Vec<f64>) -> Self {
        let n = labels.len();
        Self { labels, count: vec![0; n], sum: vec![0.0; n], sumsq: vec![0.0; n] }
    }

    pub fn n_bins(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn counts(&self) -> &[u64] {
        &self.count
    }

    /// Add one per-bin sample row.
    pub fn accumulate(&mut self, samples: &[f64]) -> Result<(), EnsembleError> {
        if samples.len() != self.labels.len() {
            return Err(EnsembleError::BinMismatch { expected: self.labels.len(), got: samples.len() });
        }
        for (i, &v) in samples.iter().enumerate() {
            self.count[i] += 1;
            self.sum[i] += v;
            self.sumsq[i] += v * v;
        }
        Ok(())
    }

    /// Fold another accumulator into this one (componentwise sums).
    pub fn merge(&mut self, other: &EnsembleAccumulator) -> Result<(), EnsembleError> {
        if other.labels.len() != self.labels.len() {
            return Err(EnsembleError::BinMismatch {
                expected: self.labels.len(),
                got: other.labels.len(),
            });
        }
        for i in 0..self.labels.len() {
            self.count[i] += other.count[i];
            self.sum[i] += other.sum[i];
            self.sumsq[i] += other.sumsq[i];
        }
        Ok(())
    }

    pub fn mean(&self, bin: usize) -> f64 {
        if self.count[bin] == 0 {
            return f64::NAN;
        }
        self.sum[bin] / self.count[bin] as f64
    }

    /// Standard error of the mean, `sqrt((E[x²] - E[x]²)/max(n-1, 1))`.
    pub fn stderr(&self, bin: usize) -> f64 {
        let n = self.count[bin];
        if n == 0 {
            return f64::NAN;
        }
        let mean = self.mean(bin);
        let var = (self.sumsq[bin] / n as f64 - mean * mean).max(0.0);
        (var / (n.max(2) - 1) as f64).sqrt()
    }

    pub fn profile(&self) -> CbsProfile {
        CbsProfile {
            bins: (0..self.n_bins())
                .map(|i| ProfileBin {
                    label: self.labels[i],
                    mean: self.mean(i),
                    stderr: self.stderr(i),
                    count: self.count[i],
                })
                .collect(),
        }
    }
}

/// One bin of an angle-resolved ensemble profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileBin {
    /// Bin label: an angle (radians) or an index, depending on the producer.
    pub label: f64,
    pub mean: f64,
    pub stderr: f64,
    pub count: u64,
}

/// Angle-resolved ensemble statistics of a CBS observable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CbsProfile {
    pub bins: Vec<ProfileBin>,
}

impl CbsProfile {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn labels(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.label).collect()
    }

    pub fn means(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.mean).collect()
    }

    /// Bin whose label is closest to `label`.
    pub fn bin_near(&self, label: f64) -> &ProfileBin {
        self.bins
            .iter()
            .min_by(|a, b| {
                (a.label - label).abs().partial_cmp(&(b.label - label).abs()).unwrap()
            })
            .expect("profile has no bins")
    }

    /// Mean of bin means over `|label| ∈ [lo, hi]`; the usual background
    /// estimate at large angles.
    pub fn background(&self, lo: f64, hi: f64) -> f64 {
        let sel: Vec<f64> = self
            .bins
            .iter()
            .filter(|b| b.label.abs() >= lo && b.label.abs() <= hi && b.mean.is_finite())
            .map(|b| b.mean)
            .collect();
        sel.iter().sum::<f64>() / sel.len() as f64
    }

    /// Divide all means and stderrs by a scale.
    pub fn normalized(&self, scale: f64) -> CbsProfile {
        CbsProfile {
            bins: self
                .bins
                .iter()
                .map(|b| ProfileBin {
                    label: b.label,
                    mean: b.mean / scale,
                    stderr: b.stderr / scale,
                    count: b.count,
                })
                .collect(),
        }
    }
}

/// Number of realizations one task processes sequentially.
///
/// Fixed as a function of the total count only, never of the worker count,
/// so the chunk boundaries (and hence all partial sums) are invariant.
pub fn chunk_size(n_realizations: u64) -> u64 {
    (n_realizations / 256).clamp(1, 4096)
}

/// Deterministic parallel reduction over realization indices `0..n`.
///
/// Each chunk of indices is mapped by one task (sequentially, in index
/// order); chunk results are folded in ascending chunk order on the calling
/// thread. The outcome is bitwise identical for any rayon pool size.
pub fn indexed_reduce<T, Init, Step, Merge>(
    n: u64,
    init: Init,
    step: Step,
    mut merge: Merge,
) -> Option<T>
where
    T: Send,
    Init: Fn() -> T + Sync,
    Step: Fn(&mut T, u64) + Sync,
    Merge: FnMut(&mut T, T),
{
    if n == 0 {
        return None;
    }
    let chunk = chunk_size(n);
    let n_chunks = n.div_ceil(chunk);
    let mut parts: Vec<T> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            let start = c * chunk;
            let end = ((c + 1) * chunk).min(n);
            for i in start..end {
                step(&mut acc, i);
            }
            acc
        })
        .collect();
    let mut out = parts.remove(0);
    for part in parts {
        merge(&mut out, part);
    }
    Some(out)
}
