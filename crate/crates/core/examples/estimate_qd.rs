//! Expected number of pieces of the dual loss for several task families.

use bandit_transfer::dual::estimate_qd;
use bandit_transfer::env::TaskDistribution;

fn main() -> bandit_transfer::Result<()> {
    let samples: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let families = [
        TaskDistribution::Bernoulli {
            center: 0.5,
            sigma: 0.1,
        },
        TaskDistribution::Bernoulli {
            center: 0.5,
            sigma: 0.5,
        },
        TaskDistribution::Uniform { sigma: 0.1 },
        TaskDistribution::Gaussian { sigma: 0.5 },
    ];
    for dist in &families {
        let est = estimate_qd(dist, 100, (0.0, 1.0), samples, 1)?;
        println!("{dist:?}: {:.2} +- {:.2}", est.mean, est.ci95);
    }
    Ok(())
}
