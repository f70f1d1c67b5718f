use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{erm::grid_erm, LearnedParam, TunerResult};
use crate::env::GpInstance;
use crate::error::{config, Result};
use crate::policies::{run_gpucb, GpUcbConfig};

/// What [`tune_gp_noise`] minimizes per task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GpObjective {
    /// Average regret over the horizon.
    #[default]
    Regret,
    /// Negative average observed reward.
    NegReward,
}

/// `size` log-spaced points from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, size: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && lo < hi && hi.is_finite()) || size < 2 {
        return config(format!(
            "geometric grid needs 0 < lo < hi and at least 2 points, got [{lo}, {hi}] x {size}"
        ));
    }
    let ratio = (hi / lo).ln() / (size - 1) as f64;
    let mut grid: Vec<f64> = (0..size).map(|k| lo * (ratio * k as f64).exp()).collect();
    grid[size - 1] = hi;
    Ok(grid)
}

/// Learns GP-UCB's assumed noise variance over a geometric grid on `s_range`.
pub fn tune_gp_noise(
    tasks: &[(GpInstance, u64)],
    s_range: (f64, f64),
    grid_size: usize,
    horizon: usize,
    gp: &GpUcbConfig,
    objective: GpObjective,
) -> Result<TunerResult> {
    let grid = geometric_grid(s_range.0, s_range.1, grid_size)?;
    let t = horizon as f64;
    let mut res = grid_erm(
        |k, s| {
            let (inst, seed) = &tasks[k];
            let rec = run_gpucb(inst, s, gp, horizon, *seed)?;
            Ok(match objective {
                GpObjective::Regret => rec.pseudo_regret().unwrap_or(0.0) / t,
                GpObjective::NegReward => -rec.total_reward() / t,
            })
        },
        tasks.len(),
        &grid,
    )?;
    res.param = LearnedParam::Noise { s: res.param.value() };
    res.config = json!({
        "method": "tune_gp_noise",
        "s_range": s_range,
        "grid_size": grid_size,
        "horizon": horizon,
        "tasks": tasks.len(),
        "objective": objective,
        "gp": gp,
    });
    Ok(res)
}

/// Distinct behaviors of GP-UCB across a noise grid on one task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GpBehavior {
    /// Distinct sequences of queried points.
    pub distinct: usize,
    /// Maximal runs of consecutive grid values sharing a sequence.
    pub runs: usize,
}

pub fn gp_behavior_count(
    instance: &GpInstance,
    s_grid: &[f64],
    horizon: usize,
    gp: &GpUcbConfig,
    seed: u64,
) -> Result<GpBehavior> {
    let mut seen = HashSet::new();
    let mut runs = 0;
    let mut prev: Option<Vec<usize>> = None;
    for &s in s_grid {
        let choices = run_gpucb(instance, s, gp, horizon, seed)?.choices;
        if prev.as_ref() != Some(&choices) {
            runs += 1;
        }
        seen.insert(choices.clone());
        prev = Some(choices);
    }
    Ok(GpBehavior {
        distinct: seen.len(),
        runs,
    })
}
