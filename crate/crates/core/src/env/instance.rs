use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use super::arm::ArmDistribution;
use crate::error::{config, domain, Result};
use crate::rng::{ids, stream};

/// A stochastic multi-armed bandit problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditInstance {
    pub arms: Vec<ArmDistribution>,
    #[serde(default)]
    pub true_means: Option<Vec<f64>>,
    #[serde(default)]
    pub label: String,
    /// Rewards are clamped to `[0, clip]` when set.
    #[serde(default)]
    pub reward_clip: Option<f64>,
}

impl BanditInstance {
    /// Builds an instance whose true means are the analytic arm means.
    pub fn new(arms: Vec<ArmDistribution>, label: impl Into<String>) -> Result<Self> {
        let true_means = Some(arms.iter().map(ArmDistribution::mean).collect());
        let instance = Self {
            arms,
            true_means,
            label: label.into(),
            reward_clip: None,
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn with_clip(mut self, clip: f64) -> Self {
        self.reward_clip = Some(clip);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.arms.is_empty() {
            return domain("a bandit instance needs at least one arm");
        }
        for arm in &self.arms {
            arm.validate()?;
        }
        if let Some(means) = &self.true_means {
            if means.len() != self.arms.len() {
                return domain("true_means length differs from the arm count");
            }
            for (i, (m, arm)) in means.iter().zip(&self.arms).enumerate() {
                if (m - arm.mean()).abs() > 1e-12 {
                    return domain(format!("true mean of arm {i} is {m}, analytic mean {}", arm.mean()));
                }
            }
        }
        if let Some(h) = self.reward_clip {
            if !(h > 0.0) {
                return domain(format!("reward clip {h} must be positive"));
            }
        }
        Ok(())
    }

    pub fn n_arms(&self) -> usize {
        self.arms.len()
    }

    /// Gaps `max_j mu_j - mu_i`, when means are known.
    pub fn gaps(&self) -> Option<Vec<f64>> {
        let means = self.true_means.as_ref()?;
        let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(means.iter().map(|m| best - m).collect())
    }

    pub(crate) fn clip(&self, reward: f64) -> f64 {
        match self.reward_clip {
            Some(h) => reward.clamp(0.0, h),
            None => reward,
        }
    }
}

/// A meta-distribution over bandit problems.
///
/// Parameters named `sigma` are standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TaskDistribution {
    /// Arm 1 is Bernoulli(0.5); arm 2 is Bernoulli(p) with `p ~ N(center, sigma^2)` clamped to [0, 1].
    Bernoulli {
        #[serde(default = "default_center")]
        center: f64,
        sigma: f64,
    },
    /// Arm 1 is U[2, 6]; arm 2 is U[4.1 - w, 4.1 + w] with `w ~ N(1.5, sigma^2)` clamped at 0.
    Uniform { sigma: f64 },
    /// Arm 1 is N(4, 1); arm 2 is N(4.1, sigma^2).
    Gaussian { sigma: f64 },
    /// Arm 1 is N(4, 1); arm 2 is N(4.1, v) with `v ~ U[var_lo, var_hi]`.
    GaussianRandomVariance {
        #[serde(default = "default_var_lo")]
        var_lo: f64,
        #[serde(default = "default_var_hi")]
        var_hi: f64,
    },
    /// Equal mixture of N(mu1, sd)/N(mu2, sd) and the arm-swapped problem.
    SymmetricGaussian { mu1: f64, mu2: f64, sd: f64 },
    /// Uniform choice among a fixed list of instances (a point mass when the list has one entry).
    Custom { instances: Vec<BanditInstance> },
}

fn default_center() -> f64 {
    0.5
}
fn default_var_lo() -> f64 {
    0.5
}
fn default_var_hi() -> f64 {
    1.5
}

impl TaskDistribution {
    pub fn validate(&self) -> Result<()> {
        let check_sigma = |s: f64| {
            if s.is_finite() && s >= 0.0 {
                Ok(())
            } else {
                config(format!("family sigma must be a nonnegative number, got {s}"))
            }
        };
        match self {
            Self::Bernoulli { center, sigma } => {
                check_sigma(*sigma)?;
                if !center.is_finite() {
                    return config("bernoulli center must be finite");
                }
                Ok(())
            }
            Self::Uniform { sigma } | Self::Gaussian { sigma } => check_sigma(*sigma),
            Self::GaussianRandomVariance { var_lo, var_hi } => {
                if *var_lo >= 0.0 && var_lo <= var_hi && var_hi.is_finite() {
                    Ok(())
                } else {
                    config(format!("variance range [{var_lo}, {var_hi}] is invalid"))
                }
            }
            Self::SymmetricGaussian { mu1, mu2, sd } => {
                check_sigma(*sd)?;
                if mu1.is_finite() && mu2.is_finite() {
                    Ok(())
                } else {
                    config("symmetric gaussian means must be finite")
                }
            }
            Self::Custom { instances } => {
                if instances.is_empty() {
                    return config("custom family needs at least one instance");
                }
                instances.iter().try_for_each(BanditInstance::validate)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Bernoulli { .. } => "bernoulli",
            Self::Uniform { .. } => "uniform",
            Self::Gaussian { .. } => "gaussian",
            Self::GaussianRandomVariance { .. } => "gaussian_random_variance",
            Self::SymmetricGaussian { .. } => "symmetric_gaussian",
            Self::Custom { .. } => "custom",
        }
    }

    /// Arm count shared by every problem of the family, if there is one.
    pub fn n_arms(&self) -> Option<usize> {
        match self {
            Self::Custom { instances } => {
                let n = instances[0].n_arms();
                instances.iter().all(|i| i.n_arms() == n).then_some(n)
            }
            _ => Some(2),
        }
    }
}

/// Draws one problem from `dist`; deterministic in `seed`.
pub fn sample_task(dist: &TaskDistribution, seed: u64) -> Result<BanditInstance> {
    dist.validate()?;
    let mut rng = stream(seed, ids::TASK);
    let normal = |mean: f64, sd: f64| Normal::new(mean, sd).expect("validated parameters");
    let (arms, label) = match dist {
        TaskDistribution::Bernoulli { center, sigma } => {
            let p = normal(*center, *sigma).sample(&mut rng).clamp(0.0, 1.0);
            (
                vec![ArmDistribution::bernoulli(0.5), ArmDistribution::bernoulli(p)],
                format!("bernoulli(0.5|{p:.6})"),
            )
        }
        TaskDistribution::Uniform { sigma } => {
            let w = normal(1.5, *sigma).sample(&mut rng).max(0.0);
            (
                vec![
                    ArmDistribution::uniform(2.0, 6.0),
                    ArmDistribution::uniform(4.1 - w, 4.1 + w),
                ],
                format!("uniform(w={w:.6})"),
            )
        }
        TaskDistribution::Gaussian { sigma } => (
            vec![
                ArmDistribution::gaussian(4.0, 1.0),
                ArmDistribution::gaussian(4.1, *sigma),
            ],
            format!("gaussian(sd={sigma})"),
        ),
        TaskDistribution::GaussianRandomVariance { var_lo, var_hi } => {
            let v = if var_lo == var_hi {
                *var_lo
            } else {
                Uniform::new(*var_lo, *var_hi)
                    .expect("validated range")
                    .sample(&mut rng)
            };
            (
                vec![
                    ArmDistribution::gaussian(4.0, 1.0),
                    ArmDistribution::gaussian(4.1, v.sqrt()),
                ],
                format!("gaussian(var={v:.6})"),
            )
        }
        TaskDistribution::SymmetricGaussian { mu1, mu2, sd } => {
            let swap = rng.random_bool(0.5);
            let (a, b) = if swap { (*mu2, *mu1) } else { (*mu1, *mu2) };
            (
                vec![ArmDistribution::gaussian(a, *sd), ArmDistribution::gaussian(b, *sd)],
                format!("symmetric_gaussian(swap={swap})"),
            )
        }
        TaskDistribution::Custom { instances } => {
            let k = if instances.len() == 1 {
                0
            } else {
                rng.random_range(0..instances.len())
            };
            return Ok(instances[k].clone());
        }
    };
    BanditInstance::new(arms, label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_family_shape() {
        let dist = TaskDistribution::Bernoulli {
            center: 0.51,
            sigma: 0.01,
        };
        let inst = sample_task(&dist, 3).unwrap();
        assert_eq!(inst.n_arms(), 2);
        assert_eq!(inst.arms[0], ArmDistribution::bernoulli(0.5));
        let means = inst.true_means.clone().unwrap();
        assert!((means[1] - 0.51).abs() < 0.06);
        assert_eq!(sample_task(&dist, 3).unwrap(), inst);
    }

    #[test]
    fn bernoulli_parameter_is_clamped() {
        let dist = TaskDistribution::Bernoulli {
            center: 0.5,
            sigma: 5.0,
        };
        for seed in 0..50 {
            let inst = sample_task(&dist, seed).unwrap();
            inst.validate().unwrap();
        }
    }

    #[test]
    fn random_variance_family() {
        let dist = TaskDistribution::GaussianRandomVariance {
            var_lo: 0.5,
            var_hi: 1.5,
        };
        for seed in 0..20 {
            let inst = sample_task(&dist, seed).unwrap();
            assert_eq!(inst.arms[0], ArmDistribution::gaussian(4.0, 1.0));
            match inst.arms[1] {
                ArmDistribution::Gaussian { mu, sigma } => {
                    assert_eq!(mu, 4.1);
                    assert!((0.5..=1.5).contains(&(sigma * sigma)));
                }
                _ => panic!("expected gaussian arm"),
            }
        }
    }

    #[test]
    fn custom_point_mass() {
        let inst = BanditInstance::new(vec![ArmDistribution::bernoulli(0.2)], "fixed").unwrap();
        let dist = TaskDistribution::Custom {
            instances: vec![inst.clone()],
        };
        for seed in [0, 1, 99, u64::MAX] {
            assert_eq!(sample_task(&dist, seed).unwrap(), inst);
        }
    }

    #[test]
    fn negative_sigma_is_config_error() {
        let dist = TaskDistribution::Uniform { sigma: -0.1 };
        assert!(matches!(sample_task(&dist, 0), Err(crate::Error::Config(_))));
    }

    #[test]
    fn family_spec_parses_from_toml() {
        let dist: TaskDistribution = toml::from_str("family = \"bernoulli\"\nsigma = 0.1\n").unwrap();
        assert_eq!(
            dist,
            TaskDistribution::Bernoulli {
                center: 0.5,
                sigma: 0.1
            }
        );
    }

    #[test]
    fn inconsistent_true_means_rejected() {
        let mut inst = BanditInstance::new(vec![ArmDistribution::bernoulli(0.2)], "x").unwrap();
        inst.true_means = Some(vec![0.3]);
        assert!(inst.validate().is_err());
    }
}
