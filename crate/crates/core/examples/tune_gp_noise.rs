//! Tune GP-UCB's noise parameter on sin x + cos y and count its distinct behaviors.

use bandit_transfer::env::GpInstance;
use bandit_transfer::policies::GpUcbConfig;
use bandit_transfer::tuner::{geometric_grid, gp_behavior_count, tune_gp_noise, GpObjective};

fn main() -> bandit_transfer::Result<()> {
    let f = GpInstance::grid_2d(|x, y| x.sin() + y.cos(), 0.0, std::f64::consts::TAU, 24, 0.01, 2.0)?;
    let config = GpUcbConfig::default();
    let horizon = 20;

    let tasks: Vec<(GpInstance, u64)> = (0..3).map(|k| (f.clone(), k)).collect();
    let result = tune_gp_noise(&tasks, (1e-3, 1.0), 32, horizon, &config, GpObjective::Regret)?;
    println!("learned {:?}, mean regret {:.4}", result.param, result.objective);

    let grid = geometric_grid(1e-3, 1.0, 128)?;
    let behavior = gp_behavior_count(&f, &grid, horizon, &config, 0)?;
    println!(
        "{} distinct point sequences over {} values of s",
        behavior.distinct,
        grid.len()
    );
    Ok(())
}
