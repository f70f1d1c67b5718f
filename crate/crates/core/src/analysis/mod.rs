//! Experiment drivers: regret curves, transfer comparisons, generalization
//! curves, and the Gaussian instance-dependent lower bound.

mod curves;
mod generalization;
mod lower_bound;
mod manifest;
mod transfer;

pub use curves::{fit_log_slope, regret_curve, CurveMode, RegretCurve};
pub use generalization::{generalization_curve, GeneralizationConfig, GeneralizationCurve, GeneralizationPoint};
pub use lower_bound::{kl_inf_gaussian, lower_bound_constant, LowerBoundReport};
pub use manifest::{config_hash, RunManifest};
pub use transfer::{transfer_experiment, TransferConfig, TransferTraces};

use crate::env::{sample_task_with_tape, TaskDistribution};
use crate::rng::derive_seed;
use crate::tuner::OfflineTask;
use crate::Result;

/// Seed namespaces of the experiment drivers.
pub(crate) mod purpose {
    pub const TRAIN: u64 = 0;
    pub const TEST: u64 = 1;
    pub const CURVE: u64 = 2;
    /// Trial `j` of a repeated experiment uses `TRIAL + j`.
    pub const TRIAL: u64 = 1 << 20;
}

/// `n` tasks from `dist` with `pulls` rewards per arm; task `k` uses seed `derive_seed(seed, k)`.
pub(crate) fn sample_tasks(dist: &TaskDistribution, n: usize, pulls: usize, seed: u64) -> Result<Vec<OfflineTask>> {
    use rayon::prelude::*;
    (0..n)
        .into_par_iter()
        .map(|k| {
            let (inst, tape) = sample_task_with_tape(dist, pulls, derive_seed(seed, k as u64))?;
            Ok(OfflineTask::from_instance(&inst, tape))
        })
        .collect()
}
