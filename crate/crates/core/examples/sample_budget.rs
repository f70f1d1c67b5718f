//! Offline tasks and pulls needed for a target accuracy.

use bandit_transfer::tuner::sample_budget;

fn main() -> bandit_transfer::Result<()> {
    let log_qd = 30f64.ln();
    for eps in [0.2, 0.1, 0.05] {
        let b = sample_budget(eps, 0.05, 1.0, log_qd, 2, 100)?;
        println!("epsilon {eps}: N = {}, T_o = {}", b.n, b.t_o);
    }
    Ok(())
}
