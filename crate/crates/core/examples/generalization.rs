//! Test regret of the tuned alpha as the number of training tasks grows.

use bandit_transfer::analysis::{generalization_curve, GeneralizationConfig};
use bandit_transfer::env::TaskDistribution;

fn main() -> bandit_transfer::Result<()> {
    let cfg = GeneralizationConfig {
        dist: TaskDistribution::Bernoulli {
            center: 0.5,
            sigma: 0.1,
        },
        n_values: vec![2, 10, 50],
        trials: 3,
        t_offline: 20,
        alpha_range: (0.0, 2.0),
        horizon: 100,
        n_test: 50,
    };
    for p in generalization_curve(&cfg, 5)?.points {
        println!(
            "N = {:>3}: test loss {:.5} +- {:.5}  alphas {:?}",
            p.n, p.mean, p.stderr, p.alphas
        );
    }
    Ok(())
}
