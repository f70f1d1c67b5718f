use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{purpose, sample_tasks};
use crate::dual::run_loss;
use crate::env::TaskDistribution;
use crate::error::{config, Result};
use crate::policies::run_ucb;
use crate::rng::derive_seed;
use crate::tuner::{tuned_ucb, OfflineTask};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizationConfig {
    pub dist: TaskDistribution,
    /// Training-set sizes, ascending.
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub t_offline: usize,
    pub alpha_range: (f64, f64),
    /// Horizon of the test tasks.
    pub horizon: usize,
    pub n_test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizationPoint {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    /// Test loss of each trial's learned parameter.
    pub per_trial: Vec<f64>,
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizationCurve {
    pub points: Vec<GeneralizationPoint>,
}

impl GeneralizationCurve {
    /// Writes `param,mean_loss,stderr` rows with the training-set size as the parameter.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["param", "mean_loss", "stderr"])?;
        for p in &self.points {
            w.write_record([p.n.to_string(), p.mean.to_string(), p.stderr.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn test_loss(tasks: &[OfflineTask], alpha: f64, horizon: usize) -> Result<f64> {
    let losses = tasks
        .par_iter()
        .map(|t| {
            run_loss(
                &run_ucb(&t.tape, alpha, horizon, t.true_means.as_deref())?,
                &t.tape,
                horizon,
            )
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(losses.iter().sum::<f64>() / losses.len() as f64)
}

/// Test regret of the tuned parameter as the number of training tasks grows.
///
/// Trial `j` draws one pool of training tasks and tunes on its first `N`
/// tasks for every `N`; all trials share one test set.
pub fn generalization_curve(cfg: &GeneralizationConfig, seed: u64) -> Result<GeneralizationCurve> {
    if cfg.n_values.is_empty() || cfg.n_values.windows(2).any(|w| w[0] >= w[1]) || cfg.n_values[0] == 0 {
        return config("n_values must be positive and strictly increasing");
    }
    if cfg.trials == 0 || cfg.n_test == 0 {
        return config("need at least one trial and one test task");
    }
    let test = sample_tasks(&cfg.dist, cfg.n_test, cfg.horizon, derive_seed(seed, purpose::TEST))?;
    let max_n = *cfg.n_values.last().expect("nonempty");
    let mut points: Vec<GeneralizationPoint> = cfg
        .n_values
        .iter()
        .map(|&n| GeneralizationPoint {
            n,
            mean: 0.0,
            stderr: 0.0,
            per_trial: Vec::new(),
            alphas: Vec::new(),
        })
        .collect();
    for j in 0..cfg.trials {
        let pool = sample_tasks(
            &cfg.dist,
            max_n,
            cfg.t_offline,
            derive_seed(seed, purpose::TRIAL + j as u64),
        )?;
        for p in points.iter_mut() {
            let alpha = tuned_ucb(&pool[..p.n], cfg.alpha_range, cfg.t_offline)?.param.value();
            p.alphas.push(alpha);
            p.per_trial.push(test_loss(&test, alpha, cfg.horizon)?);
        }
    }
    for p in points.iter_mut() {
        (p.mean, p.stderr) = crate::mean_and_stderr(&p.per_trial);
    }
    Ok(GeneralizationCurve { points })
}
