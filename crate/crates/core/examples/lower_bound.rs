//! Instance-dependent regret lower bound for Gaussian arms.

use bandit_transfer::analysis::{kl_inf_gaussian, lower_bound_constant};
use bandit_transfer::env::{ArmDistribution, BanditInstance};

fn main() -> bandit_transfer::Result<()> {
    println!("KL_inf(1, 1, B = 1e6) = {:.12}", kl_inf_gaussian(1.0, 1.0, 1e6)?);
    let instance = BanditInstance::new(
        vec![
            ArmDistribution::gaussian(4.0, 1.0),
            ArmDistribution::gaussian(4.1, 0.5),
            ArmDistribution::gaussian(3.5, 2.0),
        ],
        "three gaussians",
    )?;
    for cap in [1.0, 10.0, 1e6] {
        let report = lower_bound_constant(&instance, cap)?;
        println!("B = {cap:>9}: constant {:.4} (terms {:?})", report.total, report.terms);
    }
    Ok(())
}
