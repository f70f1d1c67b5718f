//! Tuned UCB against corralling meta-bandits on fresh tasks.

use bandit_transfer::analysis::{transfer_experiment, TransferConfig};
use bandit_transfer::env::TaskDistribution;

fn main() -> bandit_transfer::Result<()> {
    let cfg = TransferConfig {
        dist: TaskDistribution::Bernoulli {
            center: 0.7,
            sigma: 0.1,
        },
        n_train: 100,
        t_offline: 20,
        alpha_range: (0.0, 4.0),
        corral_grid: vec![0.0, 0.5, 1.0, 2.0, 4.0],
        horizon: 2000,
        n_test: 5,
        stride: 500,
    };
    let traces = transfer_experiment(&cfg, 3)?;
    println!("learned alpha {:.4}", traces.learned_alpha);
    for m in &traces.methods {
        println!(
            "{:>18}: final regret {:.2} (sd {:.2})",
            m.method,
            m.mean.last().unwrap(),
            m.sd.last().unwrap()
        );
    }
    Ok(())
}
