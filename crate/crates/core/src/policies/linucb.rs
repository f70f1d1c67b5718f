use nalgebra::{DMatrix, DVector};

use super::record::RunRecord;
use crate::env::{ContextTape, ContextualInstance};
use crate::error::{domain, Result};

/// Ridge statistics of LinUCB: `K = I + sum x x^T`, `b = sum p x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinUcbState {
    pub design: DMatrix<f64>,
    pub response: DVector<f64>,
    pub round: usize,
}

/// Per-arm `(theta . x, sqrt(x^T K^-1 x))`: the score is `mean + alpha * width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ArmScore {
    pub mean: f64,
    pub width: f64,
}

impl LinUcbState {
    pub fn new(dim: usize) -> Self {
        Self {
            design: DMatrix::identity(dim, dim),
            response: DVector::zeros(dim),
            round: 0,
        }
    }

    /// `theta = K^-1 b`.
    pub fn theta(&self) -> DVector<f64> {
        self.cholesky().solve(&self.response)
    }

    fn cholesky(&self) -> nalgebra::Cholesky<f64, nalgebra::Dyn> {
        // K starts at I and only receives rank-one PSD updates.
        self.design
            .clone()
            .cholesky()
            .expect("LinUCB design matrix is positive definite")
    }

    pub(crate) fn scores(&self, contexts: &[&[f64]]) -> Vec<ArmScore> {
        let chol = self.cholesky();
        let theta = chol.solve(&self.response);
        contexts
            .iter()
            .map(|x| {
                let x = DVector::from_column_slice(x);
                let kx = chol.solve(&x);
                ArmScore {
                    mean: theta.dot(&x),
                    width: x.dot(&kx).max(0.0).sqrt(),
                }
            })
            .collect()
    }

    pub(crate) fn update(&mut self, x: &[f64], payoff: f64) {
        let x = DVector::from_column_slice(x);
        self.design += &x * x.transpose();
        self.response += payoff * x;
        self.round += 1;
    }
}

pub(crate) fn select(scores: &[ArmScore], alpha: f64) -> usize {
    let values: Vec<f64> = scores.iter().map(|s| s.mean + alpha * s.width).collect();
    crate::argmax_first(&values)
}

pub(crate) fn round_contexts(tape: &ContextTape, t: usize) -> Vec<&[f64]> {
    tape.rounds[t].iter().map(|d| d.x.as_slice()).collect()
}

pub(crate) fn round_regret(tape: &ContextTape, t: usize, arm: usize) -> f64 {
    let best = tape.rounds[t]
        .iter()
        .map(|d| d.expected)
        .fold(f64::NEG_INFINITY, f64::max);
    best - tape.rounds[t][arm].expected
}

/// Runs LinUCB(alpha) on pre-drawn contexts and payoffs.
pub fn run_linucb_on_tape(tape: &ContextTape, alpha: f64) -> Result<RunRecord> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return domain(format!("LinUCB width {alpha} must be finite and nonnegative"));
    }
    let horizon = tape.horizon();
    let mut state = LinUcbState::new(tape.dim());
    let mut record = RunRecord::with_capacity(alpha, horizon, true);
    for t in 0..horizon {
        let contexts = round_contexts(tape, t);
        let arm = select(&state.scores(&contexts), alpha);
        let draw = &tape.rounds[t][arm];
        record.push(arm, draw.payoff, Some(round_regret(tape, t, arm)));
        state.update(&draw.x, draw.payoff);
    }
    Ok(record)
}

/// Runs LinUCB(alpha) for `horizon` rounds; contexts and payoff noise come from `seed`.
pub fn run_linucb(instance: &ContextualInstance, seed: u64, alpha: f64, horizon: usize) -> Result<RunRecord> {
    let tape = instance.draw(horizon, seed)?;
    run_linucb_on_tape(&tape, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::ContextDraw;

    fn instance() -> ContextualInstance {
        ContextualInstance {
            dim: 3,
            context_means: vec![vec![1.0, 0.0, 0.2], vec![0.0, 1.0, 0.2], vec![0.5, 0.5, 0.0]],
            context_sd: 0.5,
            theta_star: vec![0.3, 0.6, -0.2],
            noise_sd: 0.2,
        }
    }

    #[test]
    fn zero_state_picks_first_arm() {
        let rec = run_linucb(&instance(), 1, 0.0, 1).unwrap();
        assert_eq!(rec.choices, vec![0]);
    }

    #[test]
    fn scalar_recursion() {
        let payoffs = [0.3, -1.2, 2.0, 0.7, 0.1];
        let tape = ContextTape {
            rounds: payoffs
                .iter()
                .map(|&p| {
                    vec![ContextDraw {
                        x: vec![1.0],
                        expected: 0.0,
                        payoff: p,
                    }]
                })
                .collect(),
        };
        let mut state = LinUcbState::new(1);
        let mut total = 0.0;
        for (t, &p) in payoffs.iter().enumerate() {
            state.update(&[1.0], p);
            total += p;
            let theta = state.theta()[0];
            assert!((theta - total / (t as f64 + 2.0)).abs() < 1e-12);
        }
        let rec = run_linucb_on_tape(&tape, 0.7).unwrap();
        assert_eq!(rec.choices, vec![0; 5]);
    }

    #[test]
    fn deterministic() {
        let a = run_linucb(&instance(), 9, 0.8, 50).unwrap();
        let b = run_linucb(&instance(), 9, 0.8, 50).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn design_stays_symmetric_and_solves() {
        let tape = instance().draw(60, 4).unwrap();
        let mut state = LinUcbState::new(3);
        for t in 0..60 {
            let contexts = round_contexts(&tape, t);
            let arm = select(&state.scores(&contexts), 0.5);
            let d = &tape.rounds[t][arm];
            state.update(&d.x, d.payoff);
            let k = &state.design;
            assert!((k - k.transpose()).abs().max() <= 1e-12);
            let residual = k * state.theta() - &state.response;
            assert!(residual.norm() < 1e-9);
        }
    }

    #[test]
    fn regret_nondecreasing() {
        let rec = run_linucb(&instance(), 2, 1.0, 80).unwrap();
        let trace = rec.cum_regret.unwrap();
        assert!(trace.windows(2).all(|w| w[1] >= w[0]));
    }
}
