//! Pieces of LinUCB's regret as a function of its width parameter.

use bandit_transfer::dual::{linucb_dual, DEFAULT_INTERVAL_CAP};
use bandit_transfer::env::ContextualInstance;

fn main() -> bandit_transfer::Result<()> {
    let instance = ContextualInstance {
        dim: 3,
        context_means: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.4, 0.4, 0.4]],
        context_sd: 0.3,
        theta_star: vec![0.5, 0.3, 0.6],
        noise_sd: 0.2,
    };
    let loss = linucb_dual(&instance, (0.0, 3.0), 25, 11, DEFAULT_INTERVAL_CAP)?;
    println!("{} pieces", loss.pieces());
    let (best, l) = loss
        .piece_losses
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least one piece");
    let (lo, hi) = loss.intervals()[best];
    println!("lowest cumulative regret {l:.4} on [{lo:.5}, {hi:.5})");
    loss.write_csv(std::io::stdout().lock())
}
