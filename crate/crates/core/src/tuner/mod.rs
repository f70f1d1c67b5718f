//! Empirical risk minimization over hyperparameters, and sample-size calculators.

mod budget;
mod erm;
mod gp;

use serde::{Deserialize, Serialize};

pub use budget::{sample_budget, SampleBudget};
pub use erm::{grid_erm, tune_with_prior, tuned_ucb, OfflineTask};
pub use gp::{geometric_grid, gp_behavior_count, tune_gp_noise, GpBehavior, GpObjective};

/// The hyperparameter chosen by a tuner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnedParam {
    Alpha { alpha: f64 },
    AlphaPrior { alpha: f64, prior: Vec<f64> },
    Noise { s: f64 },
    Grid { value: f64 },
}

impl LearnedParam {
    /// The scalar parameter (alpha, s, or grid value).
    pub fn value(&self) -> f64 {
        match self {
            Self::Alpha { alpha } | Self::AlphaPrior { alpha, .. } => *alpha,
            Self::Noise { s } => *s,
            Self::Grid { value } => *value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunerResult {
    pub param: LearnedParam,
    /// Mean per-task loss at `param`.
    pub objective: f64,
    /// Number of candidate values compared.
    pub candidates: usize,
    /// Pieces of each task's dual loss; empty for grid searches.
    pub per_task_pieces: Vec<usize>,
    pub config: serde_json::Value,
}
