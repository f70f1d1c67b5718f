use bandit_transfer::dual::ucb_critical_points;
use bandit_transfer::env::{draw_tape, sample_task, TaskDistribution};
use bandit_transfer::policies::collect_offline_piecewise;

#[test]
fn pieces_are_the_dual_pieces_of_the_full_tape() {
    let families = [
        TaskDistribution::Bernoulli {
            center: 0.5,
            sigma: 0.3,
        },
        TaskDistribution::Uniform { sigma: 0.2 },
        TaskDistribution::GaussianRandomVariance {
            var_lo: 0.5,
            var_hi: 1.5,
        },
    ];
    let horizon = 40;
    for (f, dist) in families.iter().enumerate() {
        for seed in 0..15 {
            let task = sample_task(dist, seed).unwrap();
            let collected = collect_offline_piecewise(&task, (0.0, 2.0), horizon, seed).unwrap();
            let full = draw_tape(&task, horizon, seed).unwrap();
            let points = ucb_critical_points(&full, (0.0, 2.0), horizon).unwrap();

            let boundaries: Vec<f64> = collected.pieces.iter().skip(1).map(|p| p.0).collect();
            assert_eq!(boundaries, points, "family {f}, seed {seed}");
            assert_eq!(collected.pieces.first().unwrap().0, 0.0);
            assert_eq!(collected.pieces.last().unwrap().1, 2.0);
            for w in collected.pieces.windows(2) {
                assert_eq!(w[0].1, w[1].0);
            }

            assert_eq!(collected.total_pulls, collected.tape.total_len());
            assert!(collected.total_pulls <= task.n_arms() * horizon);
            for (drawn, reference) in collected.tape.per_arm.iter().zip(&full.per_arm) {
                assert_eq!(drawn[..], reference[..drawn.len()]);
            }
        }
    }
}
