use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::record::RunRecord;
use crate::env::GpInstance;
use crate::error::{domain, Error, Result};
use crate::rng::{ids, stream};

/// Covariance function with unit amplitude, so `k(x, x') <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    /// `exp(-|x - x'|^2 / (2 l^2))`.
    Rbf { lengthscale: f64 },
}

impl Default for Kernel {
    fn default() -> Self {
        Self::Rbf { lengthscale: 1.0 }
    }
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Self::Rbf { lengthscale } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-d2 / (2.0 * lengthscale * lengthscale)).exp()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Rbf { lengthscale } if !(*lengthscale > 0.0 && lengthscale.is_finite()) => {
                domain(format!("RBF lengthscale {lengthscale} must be positive"))
            }
            _ => Ok(()),
        }
    }
}

/// Exploration weights `beta_t` of GP-UCB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BetaSchedule {
    /// Finite-grid schedule `2 ln(n t^2 pi^2 / (6 delta))`.
    FiniteGrid {
        delta: f64,
    },
    Constant {
        beta: f64,
    },
}

impl Default for BetaSchedule {
    fn default() -> Self {
        Self::FiniteGrid { delta: 0.1 }
    }
}

impl BetaSchedule {
    pub fn beta(&self, round: usize, grid_size: usize) -> f64 {
        match self {
            Self::FiniteGrid { delta } => {
                let t = round as f64;
                2.0 * (grid_size as f64 * t * t * std::f64::consts::PI.powi(2) / (6.0 * delta)).ln()
            }
            Self::Constant { beta } => *beta,
        }
    }
}

/// Posterior mean and variance at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Posterior {
    pub mean: f64,
    pub variance: f64,
}

impl Posterior {
    pub fn std_dev(&self) -> f64 {
        self.variance.max(0.0).sqrt()
    }
}

/// Observations of a zero-mean GP with assumed noise variance `noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct GpState {
    pub kernel: Kernel,
    pub noise: f64,
    pub points: Vec<Vec<f64>>,
    pub observations: Vec<f64>,
}

const JITTER: f64 = 1e-10;

impl GpState {
    pub fn new(kernel: Kernel, noise: f64) -> Result<Self> {
        kernel.validate()?;
        if !(noise > 0.0 && noise.is_finite()) {
            return domain(format!("GP noise parameter {noise} must be positive"));
        }
        Ok(Self {
            kernel,
            noise,
            points: Vec::new(),
            observations: Vec::new(),
        })
    }

    pub fn observe(&mut self, x: Vec<f64>, y: f64) {
        self.points.push(x);
        self.observations.push(y);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Cholesky factor of `K_t + s I`, retrying with jitter from 1e-10 upward.
    fn factor(&self) -> Result<Cholesky<f64, Dyn>> {
        let t = self.len();
        let gram = DMatrix::from_fn(t, t, |i, j| {
            self.kernel.eval(&self.points[i], &self.points[j]) + if i == j { self.noise } else { 0.0 }
        });
        if let Some(c) = gram.clone().cholesky() {
            return Ok(c);
        }
        let mut jitter = JITTER;
        for _ in 0..6 {
            let mut g = gram.clone();
            for i in 0..t {
                g[(i, i)] += jitter;
            }
            if let Some(c) = g.cholesky() {
                return Ok(c);
            }
            jitter *= 10.0;
        }
        Err(Error::Numerical(format!("Cholesky of K_t + {} I failed", self.noise)))
    }

    /// Posterior at each query point.
    pub fn posterior_batch(&self, queries: &[Vec<f64>]) -> Result<Vec<Posterior>> {
        if self.is_empty() {
            return Ok(queries
                .iter()
                .map(|q| Posterior {
                    mean: 0.0,
                    variance: self.kernel.eval(q, q),
                })
                .collect());
        }
        let chol = self.factor()?;
        let y = DVector::from_column_slice(&self.observations);
        let weights = chol.solve(&y);
        let cross = DMatrix::from_fn(self.len(), queries.len(), |i, j| {
            self.kernel.eval(&self.points[i], &queries[j])
        });
        let v = chol
            .l()
            .solve_lower_triangular(&cross)
            .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
        Ok(queries
            .iter()
            .enumerate()
            .map(|(j, q)| {
                let k = cross.column(j);
                let explained = v.column(j).norm_squared();
                Posterior {
                    mean: k.dot(&weights),
                    variance: (self.kernel.eval(q, q) - explained).max(0.0),
                }
            })
            .collect())
    }
}

/// Posterior mean and variance at `query`.
pub fn gp_posterior(state: &GpState, query: &[f64]) -> Result<Posterior> {
    Ok(state.posterior_batch(&[query.to_vec()])?[0])
}

/// Settings of GP-UCB other than the tuned noise parameter.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GpUcbConfig {
    pub kernel: Kernel,
    pub beta: BetaSchedule,
}

/// Runs GP-UCB with assumed noise variance `s` on the grid of `instance`.
///
/// Each round picks the grid point maximizing `mu + sqrt(beta_t) * sd`
/// (lowest index on ties) and observes `f(x) + eps` with `eps` drawn from the
/// instance's true noise; the regret trace is `f(x*) - f(x_t)` accumulated.
pub fn run_gpucb(instance: &GpInstance, s: f64, config: &GpUcbConfig, horizon: usize, seed: u64) -> Result<RunRecord> {
    instance.validate()?;
    let mut state = GpState::new(config.kernel, s)?;
    let mut rng = stream(seed, ids::GP_NOISE);
    let noise_sd = instance.noise_var.sqrt();
    let best = instance.values[instance.best_index()];
    let n = instance.len();
    let mut record = RunRecord::with_capacity(s, horizon, true);
    for t in 1..=horizon {
        let post = state.posterior_batch(&instance.points)?;
        let root_beta = config.beta.beta(t, n).max(0.0).sqrt();
        let acquisition: Vec<f64> = post.iter().map(|p| p.mean + root_beta * p.std_dev()).collect();
        let x = crate::argmax_first(&acquisition);
        let eps: f64 = StandardNormal.sample(&mut rng);
        let y = instance.values[x] + noise_sd * eps;
        record.push(x, y, Some(best - instance.values[x]));
        state.observe(instance.points[x].clone(), y);
    }
    Ok(record)
}
