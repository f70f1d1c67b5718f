use serde::{Deserialize, Serialize};

use super::record::RunRecord;
use crate::env::{LazyTape, RewardTape};
use crate::error::{config, domain, Result};

/// Relative tolerance under which two index values count as tied when
/// resolving the right limit at a critical point.
pub(crate) const TIE_RTOL: f64 = 1e-12;

pub(crate) fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_RTOL * a.abs().max(b.abs()).max(1.0)
}

/// UCB index `mean + sqrt(alpha ln(round) / pulls)` (natural log).
pub fn ucb_index(mean: f64, pulls: usize, round: usize, alpha: f64) -> Result<f64> {
    if pulls == 0 {
        return domain("UCB index needs at least one pull");
    }
    if round < 2 {
        return domain(format!("UCB index undefined for round {round} < 2"));
    }
    if !(alpha >= 0.0) {
        return domain(format!("exploration parameter {alpha} must be nonnegative"));
    }
    Ok(index(mean, pulls, (round as f64).ln(), alpha))
}

#[inline]
fn index(mean: f64, pulls: usize, log_round: f64, alpha: f64) -> f64 {
    mean + (alpha * log_round / pulls as f64).sqrt()
}

/// Nonnegative prior arm means, each counted as one pseudo-observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec(pub Vec<f64>);

impl PriorSpec {
    pub fn validate(&self, n_arms: usize) -> Result<()> {
        if self.0.len() != n_arms {
            return config(format!("prior has {} entries for {n_arms} arms", self.0.len()));
        }
        if self.0.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return config("prior means must be finite and nonnegative");
        }
        Ok(())
    }
}

/// Where rewards come from during a run.
pub(crate) trait RewardSource {
    fn reward(&mut self, arm: usize, pull: usize) -> Result<f64>;
}

impl RewardSource for &RewardTape {
    fn reward(&mut self, arm: usize, pull: usize) -> Result<f64> {
        self.get(arm, pull)
    }
}

impl RewardSource for LazyTape<'_> {
    fn reward(&mut self, arm: usize, pull: usize) -> Result<f64> {
        Ok(self.get(arm, pull))
    }
}

/// Counters of a UCB run.
///
/// `pulls` includes prior pseudo-pulls; `consumed` counts tape entries used,
/// so the next reward of arm `i` is tape entry `consumed[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UcbState {
    pub pulls: Vec<usize>,
    pub sums: Vec<f64>,
    pub consumed: Vec<usize>,
    /// Next round to play, 1-based.
    pub round: usize,
}

impl UcbState {
    /// State after the round-robin phase: every arm pulled once.
    pub(crate) fn after_init<S: RewardSource>(n: usize, src: &mut S) -> Result<Self> {
        let sums = (0..n).map(|i| src.reward(i, 0)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            pulls: vec![1; n],
            sums,
            consumed: vec![1; n],
            round: n + 1,
        })
    }

    /// State before round 1 with one pseudo-pull per arm carrying the prior mean.
    pub(crate) fn from_prior(prior: &PriorSpec) -> Self {
        let n = prior.0.len();
        Self {
            pulls: vec![1; n],
            sums: prior.0.clone(),
            consumed: vec![0; n],
            round: 1,
        }
    }

    pub fn n_arms(&self) -> usize {
        self.pulls.len()
    }

    pub fn mean(&self, arm: usize) -> f64 {
        self.sums[arm] / self.pulls[arm] as f64
    }

    fn log_round(&self) -> f64 {
        (self.round as f64).ln()
    }

    /// Coefficient of `sqrt(alpha)` in the index of `arm`.
    fn width(&self, arm: usize) -> f64 {
        (self.log_round() / self.pulls[arm] as f64).sqrt()
    }

    fn index(&self, arm: usize, alpha: f64) -> f64 {
        index(self.mean(arm), self.pulls[arm], self.log_round(), alpha)
    }

    /// Arm maximizing the index at `alpha`; lowest index on ties.
    pub fn select(&self, alpha: f64) -> usize {
        let mut best = 0;
        let mut best_val = self.index(0, alpha);
        for i in 1..self.n_arms() {
            let v = self.index(i, alpha);
            if v > best_val {
                best = i;
                best_val = v;
            }
        }
        best
    }

    /// Arm maximizing the index on `(alpha, alpha + eps)` for small `eps`:
    /// ties at `alpha` go to the faster-growing index, then the lowest index.
    pub(crate) fn select_right_limit(&self, alpha: f64) -> usize {
        let mut best = 0;
        let mut best_val = self.index(0, alpha);
        let mut best_width = self.width(0);
        for i in 1..self.n_arms() {
            let v = self.index(i, alpha);
            let w = self.width(i);
            let better = if nearly_equal(v, best_val) {
                w > best_width
            } else {
                v > best_val
            };
            if better {
                best = i;
                best_val = v;
                best_width = w;
            }
        }
        best
    }

    /// Smallest `alpha' > alpha` at which another arm's index overtakes
    /// `leader`'s in the current round, with the overtaking arm.
    ///
    /// Only arms with fewer pulls than the leader (a wider confidence term)
    /// can overtake as alpha grows; equal pull counts never cross.
    pub(crate) fn next_crossing(&self, leader: usize, alpha: f64) -> Option<(f64, usize)> {
        let log_round = self.log_round();
        if log_round <= 0.0 {
            return None;
        }
        let lead_mean = self.mean(leader);
        let lead_inv = 1.0 / (self.pulls[leader] as f64).sqrt();
        let mut best: Option<(f64, usize)> = None;
        for i in 0..self.n_arms() {
            if i == leader || self.pulls[i] >= self.pulls[leader] {
                continue;
            }
            let denom = 1.0 / (self.pulls[i] as f64).sqrt() - lead_inv;
            let root = (lead_mean - self.mean(i)) / denom;
            let crossing = root * root / log_round;
            if !(crossing > alpha) || (lead_mean - self.mean(i)) < 0.0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((c, j)) => crossing < c || (crossing == c && self.width(i) > self.width(j)),
            };
            if better {
                best = Some((crossing, i));
            }
        }
        best
    }

    /// Records a pull of `arm` with `reward` and moves to the next round.
    pub(crate) fn advance(&mut self, arm: usize, reward: f64) {
        self.pulls[arm] += 1;
        self.sums[arm] += reward;
        self.consumed[arm] += 1;
        self.round += 1;
    }

    pub(crate) fn next_reward<S: RewardSource>(&self, src: &mut S, arm: usize) -> Result<f64> {
        src.reward(arm, self.consumed[arm])
    }
}

pub(crate) fn check_horizon(n: usize, horizon: usize) -> Result<()> {
    if horizon < n {
        return config(format!("horizon {horizon} is shorter than the {n}-arm initialization"));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        domain(format!("exploration parameter {alpha} must be finite and nonnegative"))
    }
}

fn gaps_of(means: Option<&[f64]>, n: usize) -> Result<Option<Vec<f64>>> {
    match means {
        None => Ok(None),
        Some(m) if m.len() != n => config(format!("{} true means for {n} arms", m.len())),
        Some(m) => {
            let best = m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok(Some(m.iter().map(|x| best - x).collect()))
        }
    }
}

fn play<S: RewardSource>(
    mut state: UcbState,
    src: &mut S,
    alpha: f64,
    horizon: usize,
    gaps: Option<&[f64]>,
    record: &mut RunRecord,
) -> Result<UcbState> {
    while state.round <= horizon {
        let arm = state.select(alpha);
        let reward = state.next_reward(src, arm)?;
        record.push(arm, reward, gaps.map(|g| g[arm]));
        state.advance(arm, reward);
    }
    Ok(state)
}

/// Runs UCB(alpha) for `horizon` rounds on `tape`.
///
/// Rounds `1..=n` pull each arm once; afterwards the arm with the largest
/// index is pulled (lowest index on ties). Arm `i`'s `k`-th pull reveals
/// tape entry `(i, k)`. `true_means` enables the pseudo-regret trace.
pub fn run_ucb(tape: &RewardTape, alpha: f64, horizon: usize, true_means: Option<&[f64]>) -> Result<RunRecord> {
    check_alpha(alpha)?;
    let n = tape.n_arms();
    check_horizon(n, horizon)?;
    let gaps = gaps_of(true_means, n)?;
    let mut record = RunRecord::with_capacity(alpha, horizon, gaps.is_some());
    let mut src = tape;
    let state = UcbState::after_init(n, &mut src)?;
    for (arm, &reward) in state.sums.iter().enumerate() {
        record.push(arm, reward, gaps.as_ref().map(|g| g[arm]));
    }
    play(state, &mut src, alpha, horizon, gaps.as_deref(), &mut record)?;
    Ok(record)
}

/// Runs UCB(alpha) seeded with prior means instead of the round-robin phase.
///
/// Arm `i` starts with one pseudo-pull of reward `prior[i]`, so indices are
/// defined from round 1 (where `ln 1 = 0` makes the choice greedy on the prior).
pub fn run_ucb_with_prior(
    tape: &RewardTape,
    alpha: f64,
    prior: &PriorSpec,
    horizon: usize,
    true_means: Option<&[f64]>,
) -> Result<RunRecord> {
    check_alpha(alpha)?;
    let n = tape.n_arms();
    prior.validate(n)?;
    let gaps = gaps_of(true_means, n)?;
    let mut record = RunRecord::with_capacity(alpha, horizon, gaps.is_some());
    let mut src = tape;
    play(
        UcbState::from_prior(prior),
        &mut src,
        alpha,
        horizon,
        gaps.as_deref(),
        &mut record,
    )?;
    Ok(record)
}

/// Runs from `state` with right-limit tie-breaking, returning the record and
/// the first crossing above `alpha` met along the way.
pub(crate) fn play_right_limit<S: RewardSource>(
    mut state: UcbState,
    src: &mut S,
    alpha: f64,
    horizon: usize,
) -> Result<(Vec<usize>, Option<f64>)> {
    let mut choices = Vec::with_capacity(horizon);
    let mut next: Option<f64> = None;
    while state.round <= horizon {
        let arm = state.select_right_limit(alpha);
        if let Some((c, _)) = state.next_crossing(arm, alpha) {
            next = Some(next.map_or(c, |m: f64| m.min(c)));
        }
        let reward = state.next_reward(src, arm)?;
        choices.push(arm);
        state.advance(arm, reward);
    }
    Ok((choices, next))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn index_examples() {
        assert_abs_diff_eq!(
            ucb_index(0.5, 1, 2, 1.0).unwrap(),
            1.332_554_611_157_697_8,
            epsilon = 1e-12
        );
        assert_eq!(ucb_index(0.37, 3, 10, 0.0).unwrap(), 0.37);
        // 0.6 + sqrt(2 ln(100) / 4) with ln(100) = 4.605170185988091
        assert_abs_diff_eq!(
            ucb_index(0.6, 4, 100, 2.0).unwrap(),
            2.117_427_129_385_146_3,
            epsilon = 1e-12
        );
        assert!(ucb_index(0.5, 1, 1, 1.0).is_err());
        assert!(ucb_index(0.5, 0, 5, 1.0).is_err());
        assert!(ucb_index(0.5, 1, 5, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn index_monotone(mean in -5.0f64..5.0, pulls in 1usize..50, extra in 1usize..50,
                          a in 0.0f64..10.0, b in 0.0f64..10.0) {
            let round = pulls + extra;
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-9);
            let round = round.max(2);
            prop_assert!(ucb_index(mean, pulls, round, lo).unwrap() < ucb_index(mean, pulls, round, hi).unwrap());
            prop_assert!(ucb_index(mean, pulls, round, lo).unwrap() <= ucb_index(mean, pulls, round + 1, lo).unwrap());
        }
    }

    #[test]
    fn single_arm_always_pulled() {
        let tape = RewardTape::new(vec![vec![0.3; 10]], 0);
        let rec = run_ucb(&tape, 1.0, 10, Some(&[0.3])).unwrap();
        assert!(rec.choices.iter().all(|&a| a == 0));
        assert_eq!(rec.pseudo_regret(), Some(0.0));
    }

    #[test]
    fn greedy_hand_trace() {
        let tape = RewardTape::new(vec![vec![1.0; 4], vec![0.0; 4]], 0);
        let rec = run_ucb(&tape, 0.0, 4, Some(&[1.0, 0.0])).unwrap();
        assert_eq!(rec.choices, vec![0, 1, 0, 0]);
        assert_eq!(rec.pseudo_regret(), Some(1.0));
        assert_eq!(rec.cum_regret.unwrap(), vec![0.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn tape_underflow_names_arm() {
        let tape = RewardTape::new(vec![vec![1.0; 2], vec![0.0; 4]], 0);
        match run_ucb(&tape, 0.0, 4, None) {
            Err(Error::TapeUnderflow { arm, .. }) => assert_eq!(arm, 0),
            other => panic!("expected underflow, got {other:?}"),
        }
    }

    #[test]
    fn horizon_shorter_than_arms_rejected() {
        let tape = RewardTape::new(vec![vec![1.0; 2]; 3], 0);
        assert!(run_ucb(&tape, 1.0, 2, None).is_err());
    }

    #[test]
    fn perfect_prior_is_greedy_on_best_arm() {
        let tape = RewardTape::new(vec![vec![0.2; 20], vec![0.9; 20], vec![0.5; 20]], 0);
        let prior = PriorSpec(vec![0.2, 0.9, 0.5]);
        let rec = run_ucb_with_prior(&tape, 0.0, &prior, 20, Some(&[0.2, 0.9, 0.5])).unwrap();
        assert!(rec.choices.iter().all(|&a| a == 1));
        assert_eq!(rec.pseudo_regret(), Some(0.0));
    }

    #[test]
    fn prior_single_arm() {
        let tape = RewardTape::new(vec![vec![0.4; 5]], 0);
        let rec = run_ucb_with_prior(&tape, 3.0, &PriorSpec(vec![0.0]), 5, Some(&[0.4])).unwrap();
        assert_eq!(rec.choices, vec![0; 5]);
        assert_eq!(rec.pseudo_regret(), Some(0.0));
    }

    #[test]
    fn zero_prior_hand_trace() {
        // arm 0 tape (1, 0, 1, ...), arm 1 tape (0, 1, 1, ...), alpha = 0.5, T = 6.
        let tape = RewardTape::new(
            vec![vec![1.0, 0.0, 1.0, 1.0, 1.0, 1.0], vec![0.0, 1.0, 1.0, 1.0, 1.0, 1.0]],
            0,
        );
        let plain = run_ucb(&tape, 0.5, 6, None).unwrap();
        // Round 3: means (1, 0), pulls (1, 1) -> arm 0 (reward 0). Round 4: means (0.5, 0),
        // widths sqrt(0.5 ln4 / 2) = 0.5887 vs sqrt(0.5 ln4) = 0.8326 -> 1.0887 vs 0.8326 -> arm 0 (1).
        // Round 5: means (2/3, 0), pulls (3, 1): 0.6667 + sqrt(0.5 ln5/3) = 1.1752 vs 0.8970 -> arm 0.
        // Round 6: means (3/4, 0), pulls (4, 1): 0.75 + 0.4733 = 1.2233 vs 0.9465 -> arm 0.
        assert_eq!(plain.choices, vec![0, 1, 0, 0, 0, 0]);
        let zero = run_ucb_with_prior(&tape, 0.5, &PriorSpec(vec![0.0, 0.0]), 6, None).unwrap();
        // Round 1: ln 1 = 0, tie at 0 -> arm 0 (reward 1); means (1/2, 0), pulls (2, 1).
        // Round 2: 0.5 + sqrt(0.5 ln2/2) = 0.9163 vs sqrt(0.5 ln2) = 0.5887 -> arm 0 (0); means (1/3, 0).
        // Round 3: 0.3333 + sqrt(0.5 ln3/3) = 0.7612 vs 0.7412 -> arm 0 (1); means (1/2, 0), pulls (4, 1).
        // Round 4: 0.5 + sqrt(0.5 ln4/4) = 0.9163 vs 0.8326 -> arm 0 (1); means (3/5, 0), pulls (5, 1).
        // Round 5: 0.6 + sqrt(0.5 ln5/5) = 1.0012 vs 0.8970 -> arm 0 (1); pulls (6, 1).
        // Round 6: 0.6667 + sqrt(0.5 ln6/6) = 1.0449 vs 0.9465 -> arm 0.
        assert_eq!(zero.choices, vec![0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn right_limit_prefers_wider_index_on_exact_tie() {
        let state = UcbState {
            pulls: vec![4, 2],
            sums: vec![2.0, 1.0],
            consumed: vec![4, 2],
            round: 7,
        };
        assert_eq!(state.select(0.0), 0);
        assert_eq!(state.select_right_limit(0.0), 1);
        assert_eq!(state.select(1e-9), 1);
    }

    #[test]
    fn crossing_formula() {
        let state = UcbState {
            pulls: vec![1, 2],
            sums: vec![0.4, 1.2],
            consumed: vec![1, 2],
            round: 4,
        };
        assert_eq!(state.select_right_limit(0.0), 1);
        let (c, arm) = state.next_crossing(1, 0.0).unwrap();
        assert_eq!(arm, 0);
        // (1/ln 4) * ((0.6 - 0.4) / (1 - 1/sqrt 2))^2
        assert_abs_diff_eq!(c, 0.336_345_716_362_161_8, epsilon = 1e-12);
    }
}
