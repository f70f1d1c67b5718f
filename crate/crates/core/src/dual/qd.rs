use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{sample_task_with_tape, TaskDistribution};
use crate::error::{config, Result};
use crate::rng::derive_seed;

use super::ucb::ucb_critical_points;

/// Monte Carlo estimate of the expected number of pieces of UCB's dual loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QdEstimate {
    pub mean: f64,
    /// Half-width of the normal 95% interval.
    pub ci95: f64,
    pub n_samples: usize,
    pub family: String,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub range: (f64, f64),
}

/// Number of pieces of the dual loss for each of `n_samples` tasks.
///
/// Sample `k` uses `derive_seed(seed, k)`, so the result does not depend on
/// how rayon schedules the work.
pub fn piece_counts(
    dist: &TaskDistribution,
    horizon: usize,
    alpha_range: (f64, f64),
    n_samples: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    dist.validate()?;
    (0..n_samples)
        .into_par_iter()
        .map(|k| {
            let (_, tape) = sample_task_with_tape(dist, horizon, derive_seed(seed, k as u64))?;
            Ok(ucb_critical_points(&tape, alpha_range, horizon)?.len() + 1)
        })
        .collect()
}

pub fn estimate_qd(
    dist: &TaskDistribution,
    horizon: usize,
    alpha_range: (f64, f64),
    n_samples: usize,
    seed: u64,
) -> Result<QdEstimate> {
    if n_samples == 0 {
        return config("need at least one sample");
    }
    let counts: Vec<f64> = piece_counts(dist, horizon, alpha_range, n_samples, seed)?
        .into_iter()
        .map(|c| c as f64)
        .collect();
    let (mean, se) = crate::mean_and_stderr(&counts);
    Ok(QdEstimate {
        mean,
        ci95: 1.96 * se,
        n_samples,
        family: dist.name().to_string(),
        horizon,
        range: alpha_range,
    })
}
