//! Corralling meta-bandits over a grid of UCB(α) base learners.
//!
//! Two meta-updates are provided: log-barrier online mirror descent with
//! increasing learning rates, and 1/2-Tsallis-INF. Neither restarts, and each
//! base learner only sees the rounds in which it was selected.

mod base;
mod meta;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::{ArmDistribution, BanditInstance, LazyTape};
use crate::error::{config, domain, Result};
use crate::policies::RunRecord;
use crate::rng::{ids, stream};

pub use base::BaseUcb;
pub use meta::{LogBarrier, MetaLearner, TsallisInf};

/// Which meta-update to corral with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetaRule {
    LogBarrier,
    TsallisInf,
}

/// Base learners, meta-learner and round counter of a corralling run.
#[derive(Debug, Clone)]
pub struct CorralState {
    pub bases: Vec<BaseUcb>,
    pub meta: MetaLearner,
    pub round: usize,
}

impl CorralState {
    pub fn new(alpha_grid: &[f64], n_arms: usize, horizon: usize, rule: MetaRule) -> Result<Self> {
        if alpha_grid.len() < 2 {
            return config("corralling needs at least two base learners");
        }
        if horizon == 0 {
            return config("horizon must be at least 1");
        }
        if alpha_grid.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return domain("base exploration parameters must be finite and nonnegative");
        }
        let m = alpha_grid.len();
        let meta = match rule {
            MetaRule::LogBarrier => MetaLearner::LogBarrier(LogBarrier::new(m, horizon)),
            MetaRule::TsallisInf => MetaLearner::TsallisInf(TsallisInf::new(m)),
        };
        Ok(Self {
            bases: alpha_grid.iter().map(|&a| BaseUcb::new(a, n_arms)).collect(),
            meta,
            round: 0,
        })
    }

    /// Current sampling distribution over base learners.
    pub fn probabilities(&self) -> &[f64] {
        self.meta.sampling()
    }
}

/// Outcome of a corralling run.
#[derive(Debug, Clone)]
pub struct CorralRun {
    pub record: RunRecord,
    /// Sampling distribution after the last round.
    pub final_probabilities: Vec<f64>,
    /// Per base, the sum over rounds of the importance-weighted loss fed to the meta-learner.
    pub fed_loss: Vec<f64>,
    /// Per base, the number of rounds it was selected.
    pub plays: Vec<usize>,
}

/// Default reward bounds for rescaling losses to `[0, 1]`.
///
/// Gaussian arms use three standard deviations around the mean; a clip
/// level, when set, bounds the range from above and zero from below.
pub fn reward_bounds(instance: &BanditInstance) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for arm in &instance.arms {
        let (a, b) = match arm {
            ArmDistribution::Bernoulli { .. } => (0.0, 1.0),
            ArmDistribution::Uniform { a, b } => (*a, *b),
            ArmDistribution::Gaussian { mu, sigma } => (mu - 3.0 * sigma, mu + 3.0 * sigma),
            ArmDistribution::Categorical { probs } => (0.0, (probs.len().max(2) - 1) as f64),
        };
        lo = lo.min(a);
        hi = hi.max(b);
    }
    if let Some(c) = instance.reward_clip {
        lo = lo.max(0.0);
        hi = hi.min(c);
    }
    if hi <= lo {
        hi = lo + 1.0;
    }
    (lo, hi)
}

/// Corrals UCB(α) learners for every α in `alpha_grid` on `instance`.
///
/// Arm rewards come from the instance's coin streams under `seed`, base
/// selection from a separate stream. The meta-learner sees `1 - r` rescaled
/// by `bounds` and clipped to `[0, 1]`.
pub fn run_corralled(
    instance: &BanditInstance,
    alpha_grid: &[f64],
    horizon: usize,
    seed: u64,
    rule: MetaRule,
    bounds: (f64, f64),
) -> Result<CorralRun> {
    instance.validate()?;
    if !(bounds.0 < bounds.1) {
        return config(format!("reward bounds {bounds:?} must be increasing"));
    }
    let mut state = CorralState::new(alpha_grid, instance.n_arms(), horizon, rule)?;
    let gaps = instance.gaps();
    let mut env = LazyTape::new(instance, seed);
    let mut pulls = vec![0usize; instance.n_arms()];
    let mut coins = stream(seed, ids::META);
    let m = alpha_grid.len();
    let mut record = RunRecord::with_capacity(f64::NAN, horizon, gaps.is_some());
    let mut fed_loss = vec![0.0; m];
    let mut plays = vec![0; m];
    for _ in 0..horizon {
        let probs = state.meta.sampling();
        let chosen = sample_index(probs, coins.random::<f64>());
        let p_chosen = probs[chosen];
        let arm = state.bases[chosen].choose();
        let reward = env.get(arm, pulls[arm]);
        pulls[arm] += 1;
        state.bases[chosen].update(arm, reward);
        record.push(arm, reward, gaps.as_ref().map(|g| g[arm]));
        let loss = (1.0 - (reward - bounds.0) / (bounds.1 - bounds.0)).clamp(0.0, 1.0);
        fed_loss[chosen] += loss / p_chosen;
        plays[chosen] += 1;
        state.meta.update(chosen, loss);
        state.round += 1;
    }
    Ok(CorralRun {
        record,
        final_probabilities: state.meta.sampling().to_vec(),
        fed_loss,
        plays,
    })
}

/// Inverse-CDF draw from `probs` with a uniform `u` in `[0, 1)`.
fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// Log-barrier Corral over UCB(α) learners; pseudo-regret is recorded when means are known.
pub fn run_corral(instance: &BanditInstance, alpha_grid: &[f64], horizon: usize, seed: u64) -> Result<RunRecord> {
    Ok(run_corralled(
        instance,
        alpha_grid,
        horizon,
        seed,
        MetaRule::LogBarrier,
        reward_bounds(instance),
    )?
    .record)
}

/// Tsallis-INF corralling over UCB(α) learners.
pub fn run_corral_stochastic(
    instance: &BanditInstance,
    alpha_grid: &[f64],
    horizon: usize,
    seed: u64,
) -> Result<RunRecord> {
    Ok(run_corralled(
        instance,
        alpha_grid,
        horizon,
        seed,
        MetaRule::TsallisInf,
        reward_bounds(instance),
    )?
    .record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::draw_tape;
    use crate::mean_and_stderr;
    use crate::policies::run_ucb;

    fn near_gap() -> BanditInstance {
        BanditInstance::new(
            vec![ArmDistribution::bernoulli(0.5), ArmDistribution::bernoulli(0.55)],
            "near",
        )
        .unwrap()
    }

    #[test]
    fn sampling_by_inverse_cdf() {
        assert_eq!(sample_index(&[0.25, 0.75], 0.1), 0);
        assert_eq!(sample_index(&[0.25, 0.75], 0.3), 1);
        assert_eq!(sample_index(&[0.5, 0.5, 0.0], 0.999_999_999_999), 1);
    }

    #[test]
    fn single_round() {
        for rule in [MetaRule::LogBarrier, MetaRule::TsallisInf] {
            let run = run_corralled(&near_gap(), &[0.5, 2.0], 1, 3, rule, (0.0, 1.0)).unwrap();
            assert_eq!(run.record.len(), 1);
            assert_eq!(run.plays.iter().sum::<usize>(), 1);
            let s: f64 = run.final_probabilities.iter().sum();
            assert!((s - 1.0).abs() < 1e-10);
            assert!(run.final_probabilities.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn rejects_small_grids() {
        assert!(run_corral(&near_gap(), &[1.0], 10, 0).is_err());
        assert!(run_corral(&near_gap(), &[1.0, 2.0], 0, 0).is_err());
    }

    #[test]
    fn deterministic_in_seed() {
        let a = run_corral(&near_gap(), &[0.1, 1.0, 4.0], 300, 11).unwrap();
        let b = run_corral(&near_gap(), &[0.1, 1.0, 4.0], 300, 11).unwrap();
        assert_eq!(a.choices, b.choices);
        assert_eq!(a.rewards, b.rewards);
    }

    #[test]
    fn a_a_matches_single_learner() {
        // Small gap and short horizon: both stay in the regime where regret is roughly linear.
        let inst = near_gap();
        let (horizon, seeds) = (600, 40);
        for rule in [MetaRule::LogBarrier, MetaRule::TsallisInf] {
            let mut corral = Vec::new();
            let mut single = Vec::new();
            let mut p0 = Vec::new();
            for seed in 0..seeds {
                let run = run_corralled(&inst, &[1.0, 1.0], horizon, seed, rule, (0.0, 1.0)).unwrap();
                corral.push(run.record.pseudo_regret().unwrap());
                p0.push(run.final_probabilities[0]);
                let tape = draw_tape(&inst, horizon, seed).unwrap();
                single.push(
                    run_ucb(&tape, 1.0, horizon, inst.true_means.as_deref())
                        .unwrap()
                        .pseudo_regret()
                        .unwrap(),
                );
            }
            let (mc, sc) = mean_and_stderr(&corral);
            let (ms, ss) = mean_and_stderr(&single);
            assert!(
                (mc - ms).abs() <= 2.0 * (sc * sc + ss * ss).sqrt(),
                "{rule:?}: {mc} vs {ms}"
            );
            let (mp, _) = mean_and_stderr(&p0);
            assert!((mp - 0.5).abs() < 0.15, "{rule:?}: mean weight {mp}");
        }
    }

    #[test]
    fn fed_losses_are_unbiased() {
        // One Bernoulli(0.3) arm: every base has expected loss 0.7 per round.
        let inst = BanditInstance::new(vec![ArmDistribution::bernoulli(0.3)], "one").unwrap();
        let horizon = 200;
        for rule in [MetaRule::LogBarrier, MetaRule::TsallisInf] {
            let mut per_base = vec![Vec::new(); 2];
            for seed in 0..200 {
                let run = run_corralled(&inst, &[0.5, 3.0], horizon, seed, rule, (0.0, 1.0)).unwrap();
                for (i, f) in run.fed_loss.iter().enumerate() {
                    per_base[i].push(f / horizon as f64);
                }
            }
            for xs in &per_base {
                let (m, se) = mean_and_stderr(xs);
                assert!((m - 0.7).abs() <= 3.0 * se, "{rule:?}: {m} +- {se}");
            }
        }
    }

    #[test]
    fn weight_concentrates_on_best_base() {
        // Greedy never leaves the good arm after initialization; the other base explores constantly.
        let inst = BanditInstance::new(
            vec![ArmDistribution::uniform(0.9, 1.0), ArmDistribution::uniform(0.0, 0.1)],
            "gap",
        )
        .unwrap();
        let mut w = Vec::new();
        for seed in 0..5 {
            let run = run_corralled(&inst, &[0.0, 1e6], 10_000, seed, MetaRule::TsallisInf, (0.0, 1.0)).unwrap();
            w.push(run.final_probabilities[0]);
        }
        let (m, _) = mean_and_stderr(&w);
        assert!(m > 0.9, "mean weight {m}");
    }
}
