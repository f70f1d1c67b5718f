use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::rng::{ids, stream};

/// Stochastic linear contextual bandit.
///
/// Each round, arm `i` shows a context `x ~ N(context_means[i], context_sd^2 I)`;
/// pulling it pays `theta_star . x + N(0, noise_sd^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextualInstance {
    pub dim: usize,
    pub context_means: Vec<Vec<f64>>,
    pub context_sd: f64,
    pub theta_star: Vec<f64>,
    pub noise_sd: f64,
}

impl ContextualInstance {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return domain("context dimension must be at least 1");
        }
        if self.context_means.is_empty() {
            return domain("contextual instance needs at least one arm");
        }
        if self.context_means.iter().any(|m| m.len() != self.dim) || self.theta_star.len() != self.dim {
            return domain("context means and theta_star must have length dim");
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !self.context_means.iter().all(|m| finite(m)) || !finite(&self.theta_star) {
            return domain("contextual parameters must be finite");
        }
        if !(self.context_sd >= 0.0 && self.noise_sd >= 0.0) {
            return domain("standard deviations must be nonnegative");
        }
        Ok(())
    }

    pub fn n_arms(&self) -> usize {
        self.context_means.len()
    }

    /// Pre-draws contexts and payoffs for `horizon` rounds.
    pub fn draw(&self, horizon: usize, seed: u64) -> Result<ContextTape> {
        self.validate()?;
        let mut rng = stream(seed, ids::CONTEXT);
        let ctx_noise = Normal::new(0.0, self.context_sd).expect("validated sd");
        let pay_noise = Normal::new(0.0, self.noise_sd).expect("validated sd");
        let mut rounds = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            let mut arms = Vec::with_capacity(self.n_arms());
            for mean in &self.context_means {
                let x: Vec<f64> = mean.iter().map(|m| m + ctx_noise.sample(&mut rng)).collect();
                let expected: f64 = x.iter().zip(&self.theta_star).map(|(a, b)| a * b).sum();
                let payoff = expected + pay_noise.sample(&mut rng);
                arms.push(ContextDraw { x, expected, payoff });
            }
            rounds.push(arms);
        }
        Ok(ContextTape { rounds })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContextDraw {
    pub x: Vec<f64>,
    pub expected: f64,
    pub payoff: f64,
}

/// Contexts and payoffs for every (round, arm), fixed before the run.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextTape {
    pub rounds: Vec<Vec<ContextDraw>>,
}

impl ContextTape {
    pub fn horizon(&self) -> usize {
        self.rounds.len()
    }

    pub fn n_arms(&self) -> usize {
        self.rounds.first().map_or(0, Vec::len)
    }

    pub fn dim(&self) -> usize {
        self.rounds.first().and_then(|r| r.first()).map_or(0, |d| d.x.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_deterministic() {
        let inst = ContextualInstance {
            dim: 2,
            context_means: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            context_sd: 0.3,
            theta_star: vec![0.5, 0.2],
            noise_sd: 0.1,
        };
        let a = inst.draw(10, 3).unwrap();
        assert_eq!(a, inst.draw(10, 3).unwrap());
        assert_eq!(a.horizon(), 10);
        assert_eq!(a.n_arms(), 2);
        assert!(a.rounds.iter().flatten().all(|d| d.x.iter().all(|v| v.is_finite())));
    }

    #[test]
    fn rejects_zero_dim() {
        let inst = ContextualInstance {
            dim: 0,
            context_means: vec![vec![]],
            context_sd: 0.0,
            theta_star: vec![],
            noise_sd: 0.0,
        };
        assert!(inst.validate().is_err());
    }
}
