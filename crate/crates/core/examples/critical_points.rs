//! Exact pieces of UCB's loss as a function of alpha on one task.

use bandit_transfer::dual::piecewise_dual_ucb;
use bandit_transfer::env::{sample_task_with_tape, TaskDistribution};
use bandit_transfer::policies::run_ucb;

fn main() -> bandit_transfer::Result<()> {
    let dist = TaskDistribution::Bernoulli {
        center: 0.5,
        sigma: 0.2,
    };
    let horizon = 50;
    let (task, tape) = sample_task_with_tape(&dist, horizon, 7)?;
    println!("task: {}", task.label);

    let loss = piecewise_dual_ucb(&tape, task.true_means.as_deref(), (0.0, 2.0), horizon)?;
    println!("{} pieces on [0, 2]", loss.pieces());
    for ((lo, hi), l) in loss.intervals().iter().zip(&loss.piece_losses).take(10) {
        println!("  [{lo:.6}, {hi:.6})  loss {l:.5}");
    }

    let alpha = 0.73;
    let direct = run_ucb(&tape, alpha, horizon, task.true_means.as_deref())?;
    let per_round = direct.pseudo_regret().unwrap() / horizon as f64;
    println!(
        "alpha = {alpha}: dual {:.6}, direct run {per_round:.6}",
        loss.eval(alpha)
    );
    Ok(())
}
