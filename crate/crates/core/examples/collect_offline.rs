//! Collect offline logs piece by piece and compare with uniform collection.

use bandit_transfer::env::{sample_task, write_tapes, TaskDistribution};
use bandit_transfer::policies::{collect_offline_piecewise, collect_offline_uniform};

fn main() -> bandit_transfer::Result<()> {
    let dist = TaskDistribution::Bernoulli {
        center: 0.5,
        sigma: 0.3,
    };
    let horizon = 40;
    let mut logs = Vec::new();
    for k in 0..3 {
        let task = sample_task(&dist, k)?;
        let piecewise = collect_offline_piecewise(&task, (0.0, 1.0), horizon, k)?;
        let uniform = collect_offline_uniform(&task, horizon, k)?;
        println!(
            "task {k}: {} pieces, {} pulls piecewise vs {} uniform",
            piecewise.pieces.len(),
            piecewise.total_pulls,
            uniform.total_len()
        );
        logs.push((format!("task{k}"), piecewise.tape));
    }
    let mut csv = Vec::new();
    write_tapes(&logs, &mut csv)?;
    println!("{} bytes of CSV logs", csv.len());
    Ok(())
}
