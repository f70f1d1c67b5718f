//! Offline hyperparameter transfer for stochastic bandits.
//!
//! Given a collection of offline tasks drawn from a common distribution,
//! learn the exploration parameter of UCB (or LinUCB's width, or GP-UCB's
//! noise variance) that minimizes average regret, then deploy it on fresh
//! tasks. The per-task loss, viewed as a function of the hyperparameter with
//! all randomness fixed in a [`env::RewardTape`], is piecewise constant; the
//! [`dual`] module computes its pieces exactly and [`tuner`] minimizes over
//! them.
//!
//! Modules, bottom-up:
//! - [`env`]: arm distributions, task families, reward tapes, CSV logs.
//! - [`policies`]: UCB(α), UCB with prior means, LinUCB(α), GP-UCB(s), offline collectors.
//! - [`dual`]: critical points, piecewise losses, complexity estimation.
//! - [`tuner`]: ERM tuners and sample-size calculators.
//! - [`baselines`]: corralling meta-bandits over a grid of UCB learners.
//! - [`analysis`]: experiment drivers and the Gaussian lower-bound calculator.
//! - [`cli`]: the `bt` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod baselines;
pub mod cli;
pub mod dual;
pub mod env;
mod error;
pub mod policies;
pub mod rng;
pub mod tuner;

pub use error::{Error, Result};

/// Index of the largest value; the lowest index wins ties.
pub(crate) fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Sample mean and standard error (normal approximation).
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
