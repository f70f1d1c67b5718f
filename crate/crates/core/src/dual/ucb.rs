use crate::env::RewardTape;
use crate::error::{config, domain, Error, Result};
use crate::policies::{check_horizon, check_range, run_ucb, run_ucb_with_prior, PriorSpec, RunRecord, UcbState};

use super::piecewise::{normalize_points, PiecewiseLoss};

/// When the critical-point recursion stops descending.
#[derive(Debug, Clone, Copy)]
struct Stop {
    /// Last round to play.
    horizon: Option<usize>,
    /// Stop as soon as any arm has no future reward left.
    on_any_exhausted: bool,
}

struct Frame {
    lo: f64,
    hi: f64,
    state: UcbState,
    /// Arm known to lead just right of `lo` (set when `lo` is a crossing of this round).
    leader: Option<usize>,
}

/// Critical points of UCB on `(lo, hi)` reachable from `state`.
///
/// For an interval `[lo, hi]` whose history is shared, find the arm leading
/// just right of `lo`, the first larger alpha where some other arm overtakes
/// it this round, then recurse on the left part with the leader pulled and on
/// the right part with the round replayed. Runs on an explicit stack.
fn critical_points_from(tape: &RewardTape, state: UcbState, lo: f64, hi: f64, stop: Stop) -> Result<Vec<f64>> {
    let n = state.n_arms();
    let mut points = Vec::new();
    let mut stack = vec![Frame {
        lo,
        hi,
        state,
        leader: None,
    }];
    let mut src = tape;
    while let Some(Frame { lo, hi, state, leader }) = stack.pop() {
        if stop.horizon.is_some_and(|h| state.round > h) {
            continue;
        }
        if stop.on_any_exhausted && (0..n).any(|i| state.consumed[i] >= tape.per_arm[i].len()) {
            continue;
        }
        let leader = leader.unwrap_or_else(|| state.select_right_limit(lo));
        let reward = state.next_reward(&mut src, leader)?;
        let split = state.next_crossing(leader, lo).filter(|&(c, _)| c < hi);
        let left_hi = match split {
            Some((c, overtaker)) => {
                points.push(c);
                stack.push(Frame {
                    lo: c,
                    hi,
                    state: state.clone(),
                    leader: Some(overtaker),
                });
                c
            }
            None => hi,
        };
        let mut advanced = state;
        advanced.advance(leader, reward);
        stack.push(Frame {
            lo,
            hi: left_hi,
            state: advanced,
            leader: None,
        });
    }
    let count = points.len();
    let points = normalize_points(points);
    debug_assert_eq!(points.len(), count, "critical points must be distinct");
    Ok(points)
}

/// Critical points of UCB's arm-selection sequence on `(alpha_lo, alpha_hi)`.
///
/// `pulls`, `means` and `future` describe the state after some prefix of a
/// run: arm `i` has been pulled `pulls[i]` times with average `means[i]`, and
/// `future[i]` lists its next rewards in pull order. The next round is
/// `sum(pulls) + 1`; the recursion stops on any path once some arm's future
/// is empty.
pub fn alpha_critical_points(
    alpha_lo: f64,
    alpha_hi: f64,
    pulls: &[usize],
    means: &[f64],
    future: &[Vec<f64>],
) -> Result<Vec<f64>> {
    if !(alpha_lo < alpha_hi) {
        return domain(format!("empty interval [{alpha_lo}, {alpha_hi}]"));
    }
    if pulls.len() != means.len() || pulls.len() != future.len() || pulls.is_empty() {
        return config("pulls, means and future must have one entry per arm");
    }
    if pulls.contains(&0) || means.iter().any(|m| !m.is_finite()) {
        return domain("every arm needs at least one pull and a finite mean");
    }
    let state = UcbState {
        pulls: pulls.to_vec(),
        sums: pulls.iter().zip(means).map(|(&t, m)| m * t as f64).collect(),
        consumed: vec![0; pulls.len()],
        round: pulls.iter().sum::<usize>() + 1,
    };
    let tape = RewardTape::new(future.to_vec(), 0);
    critical_points_from(
        &tape,
        state,
        alpha_lo,
        alpha_hi,
        Stop {
            horizon: None,
            on_any_exhausted: true,
        },
    )
}

/// Loss assigned to one run of `horizon` rounds.
pub(crate) fn run_loss(record: &RunRecord, tape: &RewardTape, horizon: usize) -> Result<f64> {
    let t = horizon as f64;
    match record.pseudo_regret() {
        Some(r) => Ok(r / t),
        None => {
            let best = tape.prefix_sums(horizon)?.into_iter().fold(f64::NEG_INFINITY, f64::max);
            Ok((best - record.total_reward()) / t)
        }
    }
}

fn check_means(true_means: Option<&[f64]>, n: usize) -> Result<()> {
    match true_means {
        Some(m) if m.len() != n => config(format!("{} true means for {n} arms", m.len())),
        _ => Ok(()),
    }
}

/// Critical points of UCB(alpha) over `alpha_range` for `horizon` rounds.
pub fn ucb_critical_points(tape: &RewardTape, alpha_range: (f64, f64), horizon: usize) -> Result<Vec<f64>> {
    check_range(alpha_range.0, alpha_range.1)?;
    let n = tape.n_arms();
    check_horizon(n, horizon)?;
    let mut src = tape;
    let state = UcbState::after_init(n, &mut src)?;
    critical_points_from(
        tape,
        state,
        alpha_range.0,
        alpha_range.1,
        Stop {
            horizon: Some(horizon),
            on_any_exhausted: false,
        },
    )
}

/// The derandomized dual loss `alpha -> loss of UCB(alpha)` on a fixed tape.
///
/// Loss is the average pseudo-regret when `true_means` is given, otherwise
/// the average realized regret against the best arm's first `horizon` tape
/// rewards. Each piece's loss comes from replaying UCB at the piece midpoint.
pub fn piecewise_dual_ucb(
    tape: &RewardTape,
    true_means: Option<&[f64]>,
    alpha_range: (f64, f64),
    horizon: usize,
) -> Result<PiecewiseLoss> {
    check_means(true_means, tape.n_arms())?;
    let critical_points = ucb_critical_points(tape, alpha_range, horizon)?;
    assemble(alpha_range, critical_points, |alpha| {
        run_loss(&run_ucb(tape, alpha, horizon, true_means)?, tape, horizon)
    })
}

/// Dual loss of UCB with prior means, as a function of alpha for a fixed prior.
pub fn piecewise_dual_ucb_with_prior(
    tape: &RewardTape,
    true_means: Option<&[f64]>,
    prior: &PriorSpec,
    alpha_range: (f64, f64),
    horizon: usize,
) -> Result<PiecewiseLoss> {
    check_range(alpha_range.0, alpha_range.1)?;
    check_means(true_means, tape.n_arms())?;
    prior.validate(tape.n_arms())?;
    let critical_points = critical_points_from(
        tape,
        UcbState::from_prior(prior),
        alpha_range.0,
        alpha_range.1,
        Stop {
            horizon: Some(horizon),
            on_any_exhausted: false,
        },
    )?;
    assemble(alpha_range, critical_points, |alpha| {
        run_loss(
            &run_ucb_with_prior(tape, alpha, prior, horizon, true_means)?,
            tape,
            horizon,
        )
    })
}

fn assemble(
    range: (f64, f64),
    critical_points: Vec<f64>,
    loss_at: impl Fn(f64) -> Result<f64>,
) -> Result<PiecewiseLoss> {
    let mut f = PiecewiseLoss {
        range,
        critical_points,
        piece_losses: Vec::new(),
    };
    f.piece_losses = f
        .midpoints()
        .into_iter()
        .map(|m| {
            loss_at(m).map_err(|e| Error::AtParameter {
                param: m,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    Ok(f)
}
