use serde::Serialize;
use serde_json::json;

use super::config::{need, ExperimentConfig};
use super::Command;
use crate::analysis::{
    generalization_curve, lower_bound_constant, regret_curve, transfer_experiment, CurveMode, GeneralizationConfig,
    TransferConfig,
};
use crate::dual::estimate_qd;
use crate::env::{
    load_tapes, sample_task, write_tapes, ArmDistribution, BanditInstance, GpInstance, SurrogateExtension,
};
use crate::error::{config, Result};
use crate::policies::{collect_offline_piecewise, collect_offline_uniform, run_ucb, GpUcbConfig, Kernel, PriorSpec};
use crate::rng::derive_seed;
use crate::tuner::{
    geometric_grid, gp_behavior_count, grid_erm, sample_budget, tune_gp_noise, tune_with_prior, tuned_ucb, GpObjective,
    OfflineTask,
};

/// Named output files.
pub(crate) type Outputs = Vec<(String, Vec<u8>)>;

fn json_file<T: Serialize>(name: &str, value: &T) -> Result<(String, Vec<u8>)> {
    Ok((
        name.to_string(),
        (serde_json::to_string_pretty(value)? + "\n").into_bytes(),
    ))
}

fn csv_file(name: &str, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<(String, Vec<u8>)> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok((name.to_string(), buf))
}

pub(crate) fn dispatch(cmd: &Command, cfg: &ExperimentConfig, seed: u64) -> Result<Outputs> {
    match cmd {
        Command::Tune(_) => tune(cfg, seed),
        Command::TunePrior(_) => tune_prior(cfg, seed),
        Command::TuneGp(_) => tune_gp(cfg, seed),
        Command::Qd(_) => qd(cfg, seed),
        Command::RegretCurve(_) => curve(cfg, seed),
        Command::Transfer(_) => transfer(cfg, seed),
        Command::Generalize(_) => generalize(cfg, seed),
        Command::LowerBound(_) => lower_bound(cfg),
        Command::Collect(_) => collect(cfg, seed),
        Command::Budget(_) => budget(cfg),
    }
}

/// Offline tasks from a log file or sampled from the configured family.
fn offline_tasks(cfg: &ExperimentConfig, seed: u64) -> Result<(Vec<OfflineTask>, usize)> {
    let horizon = need(cfg.t_offline, "t_offline")?;
    if let Some(path) = &cfg.tapes {
        let ext = SurrogateExtension { horizon, seed };
        let tasks = load_tapes(path, Some(ext))?
            .into_iter()
            .map(|(_, tape)| OfflineTask::new(tape, None))
            .collect();
        return Ok((tasks, horizon));
    }
    let dist = cfg.distribution()?;
    let n = need(cfg.n_train, "n_train")?;
    let tasks = crate::analysis::sample_tasks(&dist, n, horizon, derive_seed(seed, crate::analysis::purpose::TRAIN))?;
    Ok((tasks, horizon))
}

fn tune(cfg: &ExperimentConfig, seed: u64) -> Result<Outputs> {
    let (tasks, horizon) = offline_tasks(cfg, seed)?;
    let result = match &cfg.alpha_grid {
        Some(grid) => grid_erm(
            |k, a| {
                let t = &tasks[k];
                crate::dual::run_loss(
                    &run_ucb(&t.tape, a, horizon, t.true_means.as_deref())?,
                    &t.tape,
                    horizon,
                )
            },
            tasks.len(),
            grid,
        )?,
        None => tuned_ucb(&tasks, cfg.alpha_range()?, horizon)?,
    };
    Ok(vec![json_file("tuner.json", &result)?])
}

/// Every vector of `levels` entries of length `n`, in lexicographic order.
fn product_grid(levels: &[f64], n: usize) -> Result<Vec<PriorSpec>> {
    let size = levels.len().checked_pow(n as u32).filter(|&s| s <= 100_000);
    let Some(size) = size else {
        return config(format!(
            "prior_levels: {} levels over {n} arms is too many priors",
            levels.len()
        ));
    };
    Ok((0..size)
        .map(|mut k| {
            let mut v = vec![0.0; n];
            for slot in v.iter_mut().rev() {
                *slot = levels[k % levels.len()];
                k /= levels.len();
            }
            PriorSpec(v)
        })
        .collect())
}

fn tune_prior(cfg: &ExperimentConfig, seed: u64) -> Result<Outputs> {
    let (tasks, horizon) = offline_tasks(cfg, seed)?;
    let Some(first) = tasks.first() else {
        return config("n_train: need at least one task");
    };
    let levels = cfg
        .prior_levels
        .clone()
        .unwrap_or_else(|| vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    if levels.is_empty() {
        return config("prior_levels: need at least one level");
    }
    let grid = product_grid(&levels, first.tape.n_arms())?;
    let result = tune_with_prior(&tasks, cfg.alpha_range()?, &grid, horizon)?;
    Ok(vec![json_file("tuner.json", &result)?])
}

/// `sin x + cos y` on a `side x side` grid over `[0, 2 pi]^2`.
fn gp_instance(cfg: &ExperimentConfig) -> Result<GpInstance> {
    let side = cfg.gp_side.unwrap_or(24);
    let noise = cfg.gp_noise_var.unwrap_or(0.01);
    GpInstance::grid_2d(|x, y| x.sin() + y.cos(), 0.0, std::f64::consts::TAU, side, noise, 2.0)
}

fn tune_gp(cfg: &ExperimentConfig, seed: u64) -> Result<Outputs> {
    let instance = gp_instance(cfg)?;
    let horizon = cfg.t.unwrap_or(20);
    let n_tasks = cfg.n_tasks.unwrap_or(5);
    let range = (cfg.s_min.unwrap_or(1e-3), cfg.s_max.unwrap_or(1.0));
    let grid_size = cfg.s_grid.unwrap_or(64);
    let gp = GpUcbConfig {
        kernel: Kernel::Rbf {
            lengthscale: cfg.lengthscale.unwrap_or(1.0),
        },
        ..Default::default()
    };
    let tasks: Vec<(GpInstance, u64)> = (0..n_tasks)
        .map(|k| (instance.clone(), derive_seed(seed, k as u64)))
        .collect();
    let result = tune_gp_noise(&tasks, range, grid_size, horizon, &gp, GpObjective::Regret)?;
    let grid = geometric_grid(range.0, range.1, grid_size)?;
    let behavior = tasks
        .iter()
        .map(|(inst, s)| gp_behavior_count(inst, &grid, horizon, &gp, *s))
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![
        json_file("tuner.json", &result)?,
        json_file("gp_behavior.json", &behavior)?,
    ])
}

fn qd(cfg: &ExperimentConfig, seed: u64) -> Result<Outputs> {
    let est = estimate_qd(
        &cfg.distribution()?,
        need(cfg.t, "t")?,
        cfg.alpha_range()?,
        need(cfg.samples, "samples")?,
        seed,
    )?;
    Ok(vec![json_file("qd.json", &est)?])
}

fn curve(cfg: &ExperimentConfig, seed: u64) -> Result<Outputs> {
    let mode = match &cfg.alpha_grid {
        Some(points) => CurveMode::Grid { points: points.clone() },
        None => {
            let (lo, hi) = cfg.alpha_range()?;
            CurveMode::Piecewise { lo, hi }
        }
    };
    let c = regret_curve(
        &cfg.distribution()?,
        &mode,
        need(cfg.n_tasks, "n_tasks")?,
        need(cfg.t, "t")?,
        seed,
    )?;
    Ok(vec![csv_file("curve.csv", |b| c.write_csv(b))?])
}

fn transfer(cfg: &ExperimentConfig, seed: u64) -> Result<Outputs> {
    let alpha_range = cfg.alpha_range()?;
    let corral_grid = match &cfg.corral_grid {
        Some(g) => g.clone(),
        None => (0..5)
            .map(|k| alpha_range.0 + (alpha_range.1 - alpha_range.0) * k as f64 / 4.0)
            .collect(),
    };
    let tc = TransferConfig {
        dist: cfg.distribution()?,
        n_train: need(cfg.n_train, "n_train")?,
        t_offline: need(cfg.t_offline, "t_offline")?,
        alpha_range,
        corral_grid,
        horizon: need(cfg.t, "t")?,
        n_test: cfg.n_test.unwrap_or(5),
        stride: cfg.stride.unwrap_or(1),
    };
    let traces = transfer_experiment(&tc, seed)?;
    let summary = json!({
        "learned_alpha": traces.learned_alpha,
        "final": traces.methods.iter().map(|m| json!({
            "method": m.method,
            "mean": m.mean.last(),
            "sd": m.sd.last(),
            "per_task": m.finals,
        })).collect::<Vec<_>>(),
    });
    Ok(vec![
        csv_file("traces.csv", |b| traces.write_csv(b))?,
        json_file("transfer.json", &summary)?,
    ])
}

fn generalize(cfg: &ExperimentConfig, seed: u64) -> Result<Outputs> {
    let gc = GeneralizationConfig {
        dist: cfg.distribution()?,
        n_values: cfg.n_values.clone().unwrap_or_else(|| vec![10, 50, 200]),
        trials: cfg.trials.unwrap_or(5),
        t_offline: need(cfg.t_offline, "t_offline")?,
        alpha_range: cfg.alpha_range()?,
        horizon: need(cfg.t, "t")?,
        n_test: need(cfg.n_test, "n_test")?,
    };
    let curve = generalization_curve(&gc, seed)?;
    Ok(vec![
        csv_file("generalization.csv", |b| curve.write_csv(b))?,
        json_file("generalization.json", &curve)?,
    ])
}

fn lower_bound(cfg: &ExperimentConfig) -> Result<Outputs> {
    let means = cfg
        .means
        .clone()
        .ok_or_else(|| crate::Error::Config("means: required".into()))?;
    let sds = cfg.sds.clone().unwrap_or_else(|| vec![1.0; means.len()]);
    if sds.len() != means.len() {
        return config(format!("sds: {} values for {} means", sds.len(), means.len()));
    }
    let arms = means
        .iter()
        .zip(&sds)
        .map(|(&m, &s)| ArmDistribution::gaussian(m, s))
        .collect();
    let instance = BanditInstance::new(arms, "lower-bound")?;
    let report = lower_bound_constant(&instance, cfg.cap.unwrap_or(f64::MAX.sqrt()))?;
    Ok(vec![json_file("lower_bound.json", &report)?])
}

fn collect(cfg: &ExperimentConfig, seed: u64) -> Result<Outputs> {
    let dist = cfg.distribution()?;
    let horizon = need(cfg.t, "t")?;
    let n_tasks = cfg.n_tasks.unwrap_or(1);
    let policy = cfg.policy.as_deref().unwrap_or("piecewise");
    let mut tapes = Vec::with_capacity(n_tasks);
    let mut summary = Vec::with_capacity(n_tasks);
    for k in 0..n_tasks {
        let task_seed = derive_seed(seed, k as u64);
        let mut inst = sample_task(&dist, task_seed)?;
        if let Some(c) = cfg.clip {
            inst = inst.with_clip(c);
        }
        let (tape, pieces) = match policy {
            "uniform" => (collect_offline_uniform(&inst, horizon, task_seed)?, None),
            "piecewise" => {
                let out = collect_offline_piecewise(&inst, cfg.alpha_range()?, horizon, task_seed)?;
                (out.tape, Some(out.pieces))
            }
            other => return config(format!("policy: unknown policy `{other}`")),
        };
        summary.push(json!({ "task_id": format!("task{k}"), "total_pulls": tape.total_len(), "pieces": pieces }));
        tapes.push((format!("task{k}"), tape));
    }
    Ok(vec![
        csv_file("tapes.csv", |b| write_tapes(&tapes, b))?,
        json_file(
            "collection.json",
            &json!({ "policy": policy, "horizon": horizon, "tasks": summary }),
        )?,
    ])
}

fn budget(cfg: &ExperimentConfig) -> Result<Outputs> {
    let b = sample_budget(
        need(cfg.epsilon, "epsilon")?,
        need(cfg.delta, "delta")?,
        cfg.h.unwrap_or(1.0),
        need(cfg.log_qd, "log_qd")?,
        need(cfg.n_arms, "n_arms")?,
        need(cfg.t, "t")?,
    )?;
    Ok(vec![json_file("budget.json", &b)?])
}
