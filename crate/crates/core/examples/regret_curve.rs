//! Mean per-round regret of UCB across alpha, exact over pieces.

use bandit_transfer::analysis::{regret_curve, CurveMode};
use bandit_transfer::env::TaskDistribution;

fn main() -> bandit_transfer::Result<()> {
    let dist = TaskDistribution::Gaussian { sigma: 0.5 };
    let curve = regret_curve(&dist, &CurveMode::Piecewise { lo: 0.0, hi: 3.0 }, 30, 60, 2)?;
    println!(
        "{} evaluation points, minimizer {:.4}",
        curve.params.len(),
        curve.argmin()
    );
    let step = (curve.params.len() / 10).max(1);
    for k in (0..curve.params.len()).step_by(step) {
        println!(
            "  alpha {:.4}: {:.5} +- {:.5}",
            curve.params[k], curve.mean_loss[k], curve.stderr[k]
        );
    }
    Ok(())
}
