//! Learn UCB's exploration parameter from offline tasks and check it on fresh ones.

use bandit_transfer::env::{sample_task_with_tape, TaskDistribution};
use bandit_transfer::policies::run_ucb;
use bandit_transfer::tuner::{tuned_ucb, OfflineTask};

fn main() -> bandit_transfer::Result<()> {
    let dist = TaskDistribution::Bernoulli {
        center: 0.6,
        sigma: 0.1,
    };
    let (t_offline, n_train) = (30, 100);
    let tasks = (0..n_train)
        .map(|k| sample_task_with_tape(&dist, t_offline, k).map(|(i, t)| OfflineTask::from_instance(&i, t)))
        .collect::<bandit_transfer::Result<Vec<_>>>()?;

    let result = tuned_ucb(&tasks, (0.0, 4.0), t_offline)?;
    let alpha = result.param.value();
    println!(
        "alpha = {alpha:.5}, training loss {:.5}, {} candidates",
        result.objective, result.candidates
    );

    let horizon = 500;
    for a in [alpha, 0.5, 2.0] {
        let regret: f64 = (1000..1050)
            .map(|k| {
                let (task, tape) = sample_task_with_tape(&dist, horizon, k).unwrap();
                run_ucb(&tape, a, horizon, task.true_means.as_deref())
                    .unwrap()
                    .pseudo_regret()
                    .unwrap()
            })
            .sum::<f64>()
            / 50.0;
        println!("alpha {a:.4}: mean test regret over T = {horizon}: {regret:.3}");
    }
    Ok(())
}
