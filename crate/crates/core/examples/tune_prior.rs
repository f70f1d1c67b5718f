//! Jointly learn alpha and prior arm means for UCB.

use bandit_transfer::env::{sample_task_with_tape, TaskDistribution};
use bandit_transfer::policies::PriorSpec;
use bandit_transfer::tuner::{tune_with_prior, tuned_ucb, OfflineTask};

fn main() -> bandit_transfer::Result<()> {
    let dist = TaskDistribution::Bernoulli {
        center: 0.8,
        sigma: 0.05,
    };
    let horizon = 30;
    let tasks = (0..40)
        .map(|k| sample_task_with_tape(&dist, horizon, k).map(|(i, t)| OfflineTask::from_instance(&i, t)))
        .collect::<bandit_transfer::Result<Vec<_>>>()?;

    let levels = [0.0, 0.5, 1.0];
    let grid: Vec<PriorSpec> = levels
        .iter()
        .flat_map(|&a| levels.iter().map(move |&b| PriorSpec(vec![a, b])))
        .collect();

    let plain = tuned_ucb(&tasks, (0.0, 2.0), horizon)?;
    let with_prior = tune_with_prior(&tasks, (0.0, 2.0), &grid, horizon)?;
    println!("no prior:   {:?}  loss {:.5}", plain.param, plain.objective);
    println!("with prior: {:?}  loss {:.5}", with_prior.param, with_prior.objective);
    Ok(())
}
