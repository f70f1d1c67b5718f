use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{purpose, sample_tasks};
use crate::baselines::{run_corral, run_corral_stochastic};
use crate::env::{draw_tape, sample_task, TaskDistribution};
use crate::error::{config, Result};
use crate::policies::{run_ucb, RunRecord};
use crate::rng::derive_seed;
use crate::tuner::tuned_ucb;

/// Settings of a tune-then-deploy comparison against corralling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferConfig {
    pub dist: TaskDistribution,
    pub n_train: usize,
    /// Horizon of the offline tasks.
    pub t_offline: usize,
    /// Tuning range; `lo == hi` deploys that value without tuning.
    pub alpha_range: (f64, f64),
    /// Exploration parameters of the corralled base learners.
    pub corral_grid: Vec<f64>,
    /// Horizon of the test tasks.
    pub horizon: usize,
    pub n_test: usize,
    /// Keep every `stride`-th step of the traces (the last step is always kept).
    #[serde(default = "one")]
    pub stride: usize,
}

fn one() -> usize {
    1
}

/// Mean and standard deviation of cumulative regret across test tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodTrace {
    pub method: String,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
    /// Final cumulative regret on each test task.
    pub finals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferTraces {
    pub learned_alpha: f64,
    /// 1-based rounds at which traces are reported.
    pub steps: Vec<usize>,
    pub methods: Vec<MethodTrace>,
}

impl TransferTraces {
    pub fn method(&self, name: &str) -> Option<&MethodTrace> {
        self.methods.iter().find(|m| m.method == name)
    }

    /// Writes `step,method,mean_regret,sd` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "method", "mean_regret", "sd"])?;
        for m in &self.methods {
            for (k, step) in self.steps.iter().enumerate() {
                w.write_record([
                    step.to_string(),
                    m.method.clone(),
                    m.mean[k].to_string(),
                    m.sd[k].to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn trace(method: &str, runs: &[RunRecord], steps: &[usize]) -> MethodTrace {
    let curves: Vec<&Vec<f64>> = runs
        .iter()
        .map(|r| r.cum_regret.as_ref().expect("synthetic tasks have means"))
        .collect();
    let n = curves.len() as f64;
    let mut mean = Vec::with_capacity(steps.len());
    let mut sd = Vec::with_capacity(steps.len());
    for &s in steps {
        let xs: Vec<f64> = curves.iter().map(|c| c[s - 1]).collect();
        let m = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 {
            xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        mean.push(m);
        sd.push(var.sqrt());
    }
    MethodTrace {
        method: method.to_string(),
        mean,
        sd,
        finals: curves.iter().map(|c| *c.last().expect("horizon >= 1")).collect(),
    }
}

/// Tunes UCB's alpha on offline tasks, then compares UCB(alpha-hat) with
/// both corralling baselines on fresh tasks from the same family.
///
/// Each test task's arm rewards are the same for all three methods.
pub fn transfer_experiment(cfg: &TransferConfig, seed: u64) -> Result<TransferTraces> {
    if cfg.n_test == 0 || cfg.horizon == 0 || cfg.stride == 0 || cfg.corral_grid.is_empty() {
        return config("transfer needs n_test, horizon and stride >= 1 and a nonempty corral grid");
    }
    let learned_alpha = if cfg.alpha_range.0 == cfg.alpha_range.1 {
        cfg.alpha_range.0
    } else {
        let train = sample_tasks(&cfg.dist, cfg.n_train, cfg.t_offline, derive_seed(seed, purpose::TRAIN))?;
        tuned_ucb(&train, cfg.alpha_range, cfg.t_offline)?.param.value()
    };
    let test_seed = derive_seed(seed, purpose::TEST);
    let runs: Vec<[RunRecord; 3]> = (0..cfg.n_test)
        .into_par_iter()
        .map(|j| {
            let task_seed = derive_seed(test_seed, j as u64);
            let inst = sample_task(&cfg.dist, task_seed)?;
            let tape = draw_tape(&inst, cfg.horizon, task_seed)?;
            let tuned = run_ucb(&tape, learned_alpha, cfg.horizon, inst.true_means.as_deref())?;
            if cfg.corral_grid.len() == 1 {
                // One base learner: corralling reduces to running it.
                let single = run_ucb(&tape, cfg.corral_grid[0], cfg.horizon, inst.true_means.as_deref())?;
                return Ok([tuned, single.clone(), single]);
            }
            let corral = run_corral(&inst, &cfg.corral_grid, cfg.horizon, task_seed)?;
            let stochastic = run_corral_stochastic(&inst, &cfg.corral_grid, cfg.horizon, task_seed)?;
            Ok([tuned, corral, stochastic])
        })
        .collect::<Result<_>>()?;
    let mut steps: Vec<usize> = (1..=cfg.horizon).step_by(cfg.stride).collect();
    if steps.last() != Some(&cfg.horizon) {
        steps.push(cfg.horizon);
    }
    let names = ["tuned_ucb", "corral", "corral_stochastic"];
    let methods = (0..3)
        .map(|k| {
            let column: Vec<RunRecord> = runs.iter().map(|r| r[k].clone()).collect();
            trace(names[k], &column, &steps)
        })
        .collect();
    Ok(TransferTraces {
        learned_alpha,
        steps,
        methods,
    })
}
