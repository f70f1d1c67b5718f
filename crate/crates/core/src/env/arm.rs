use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{domain, Result};

/// Reward distribution of a single arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArmDistribution {
    Bernoulli {
        p: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    Gaussian {
        mu: f64,
        sigma: f64,
    },
    /// Takes value `k` with probability `probs[k]`.
    Categorical {
        probs: Vec<f64>,
    },
}

impl ArmDistribution {
    pub fn bernoulli(p: f64) -> Self {
        Self::Bernoulli { p }
    }

    pub fn uniform(a: f64, b: f64) -> Self {
        Self::Uniform { a, b }
    }

    pub fn gaussian(mu: f64, sigma: f64) -> Self {
        Self::Gaussian { mu, sigma }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Bernoulli { p } if !(0.0..=1.0).contains(p) => {
                domain(format!("Bernoulli parameter {p} outside [0, 1]"))
            }
            Self::Uniform { a, b } if !(a.is_finite() && b.is_finite() && a <= b) => {
                domain(format!("Uniform bounds [{a}, {b}] are not an interval"))
            }
            Self::Gaussian { mu, sigma } if !(mu.is_finite() && sigma.is_finite() && *sigma >= 0.0) => {
                domain(format!("Gaussian({mu}, {sigma}) has invalid parameters"))
            }
            Self::Categorical { probs } => {
                if probs.is_empty() || probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return domain("categorical probabilities must lie in [0, 1]");
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return domain(format!("categorical probabilities sum to {total}"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Bernoulli { p } => *p,
            Self::Uniform { a, b } => 0.5 * (a + b),
            Self::Gaussian { mu, .. } => *mu,
            Self::Categorical { probs } => probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::Bernoulli { p } => p * (1.0 - p),
            Self::Uniform { a, b } => (b - a).powi(2) / 12.0,
            Self::Gaussian { sigma, .. } => sigma * sigma,
            Self::Categorical { probs } => {
                let m = self.mean();
                probs.iter().enumerate().map(|(k, p)| p * (k as f64 - m).powi(2)).sum()
            }
        }
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Bernoulli { p } => {
                if x < 0.0 {
                    0.0
                } else if x < 1.0 {
                    1.0 - p
                } else {
                    1.0
                }
            }
            Self::Uniform { a, b } => {
                if x < *a {
                    0.0
                } else if x >= *b {
                    1.0
                } else {
                    (x - a) / (b - a)
                }
            }
            Self::Gaussian { mu, sigma } => {
                if *sigma == 0.0 {
                    if x < *mu {
                        0.0
                    } else {
                        1.0
                    }
                } else {
                    standard_normal().cdf((x - mu) / sigma)
                }
            }
            Self::Categorical { probs } => {
                if x < 0.0 {
                    return 0.0;
                }
                let top = (x.floor() as usize).min(probs.len() - 1);
                probs[..=top].iter().sum::<f64>().min(1.0)
            }
        }
    }

    /// Generalized inverse CDF `inf { x : F(x) >= u }`.
    pub fn inverse_cdf(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return domain(format!("inverse CDF argument {u} outside [0, 1]"));
        }
        Ok(match self {
            Self::Bernoulli { p } => {
                if u <= 1.0 - p {
                    0.0
                } else {
                    1.0
                }
            }
            Self::Uniform { a, b } => a + (b - a) * u,
            Self::Gaussian { mu, sigma } => {
                if *sigma == 0.0 {
                    *mu
                } else {
                    mu + sigma * standard_normal().inverse_cdf(u)
                }
            }
            Self::Categorical { probs } => {
                let mut acc = 0.0;
                let mut value = probs.len() - 1;
                for (k, p) in probs.iter().enumerate() {
                    acc += p;
                    if u <= acc {
                        value = k;
                        break;
                    }
                }
                value as f64
            }
        })
    }
}

fn standard_normal() -> Normal {
    Normal::standard()
}
