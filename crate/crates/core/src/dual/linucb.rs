use crate::env::{ContextTape, ContextualInstance};
use crate::error::{Error, Result};
use crate::policies::{check_range, nearly_equal, round_contexts, round_regret, ArmScore, LinUcbState};

use super::piecewise::PiecewiseLoss;

/// Default bound on the number of intervals explored by [`linucb_dual`].
pub const DEFAULT_INTERVAL_CAP: usize = 1_000_000;

/// Arm with the largest score just right of `alpha`.
fn right_limit_leader(scores: &[ArmScore], alpha: f64) -> usize {
    let mut best = 0;
    for i in 1..scores.len() {
        let (v, b) = (
            scores[i].mean + alpha * scores[i].width,
            scores[best].mean + alpha * scores[best].width,
        );
        let better = if nearly_equal(v, b) {
            scores[i].width > scores[best].width
        } else {
            v > b
        };
        if better {
            best = i;
        }
    }
    best
}

/// Upper envelope of the lines `mean + alpha * width` on `[lo, hi]`, as
/// `(segment_lo, segment_hi, arm)` from left to right.
fn envelope(scores: &[ArmScore], lo: f64, hi: f64) -> Vec<(f64, f64, usize)> {
    let mut segments = Vec::new();
    let mut start = lo;
    let mut cur = right_limit_leader(scores, lo);
    loop {
        let mut next: Option<(f64, usize)> = None;
        for (j, s) in scores.iter().enumerate() {
            if s.width <= scores[cur].width {
                continue;
            }
            let c = (scores[cur].mean - s.mean) / (s.width - scores[cur].width);
            if !(c > start) {
                continue;
            }
            let better = match next {
                None => true,
                Some((b, k)) => c < b || (c == b && s.width > scores[k].width),
            };
            if better {
                next = Some((c, j));
            }
        }
        match next {
            Some((c, j)) if c < hi => {
                segments.push((start, c, cur));
                start = c;
                cur = j;
            }
            _ => {
                segments.push((start, hi, cur));
                return segments;
            }
        }
    }
}

struct Frame {
    lo: f64,
    hi: f64,
    round: usize,
    state: LinUcbState,
    cum_regret: f64,
}

/// Piecewise-constant average regret of LinUCB as a function of its width
/// multiplier on a fixed context tape.
///
/// Fails with [`Error::Resource`] once more than `cap` intervals are live.
pub fn linucb_dual_on_tape(tape: &ContextTape, alpha_range: (f64, f64), cap: usize) -> Result<PiecewiseLoss> {
    let (lo, hi) = alpha_range;
    check_range(lo, hi)?;
    let horizon = tape.horizon();
    let mut leaves: Vec<(f64, f64, f64)> = Vec::new();
    let mut stack = vec![Frame {
        lo,
        hi,
        round: 0,
        state: LinUcbState::new(tape.dim()),
        cum_regret: 0.0,
    }];
    while let Some(frame) = stack.pop() {
        if frame.round == horizon {
            leaves.push((frame.lo, frame.hi, frame.cum_regret / horizon.max(1) as f64));
            continue;
        }
        let t = frame.round;
        let scores = frame.state.scores(&round_contexts(tape, t));
        let segments = envelope(&scores, frame.lo, frame.hi);
        if leaves.len() + stack.len() + segments.len() > cap {
            return Err(Error::Resource(format!("LinUCB dual exceeded {cap} intervals")));
        }
        let mut owned = Some(frame.state);
        for (k, &(a, b, arm)) in segments.iter().enumerate().rev() {
            let mut state = if k == 0 {
                owned.take().unwrap()
            } else {
                owned.as_ref().unwrap().clone()
            };
            let draw = &tape.rounds[t][arm];
            state.update(&draw.x, draw.payoff);
            let cum_regret = frame.cum_regret + round_regret(tape, t, arm);
            stack.push(Frame {
                lo: a,
                hi: b,
                round: t + 1,
                state,
                cum_regret,
            });
        }
    }
    let critical_points = leaves[..leaves.len() - 1].iter().map(|l| l.1).collect();
    let piece_losses = leaves.iter().map(|l| l.2).collect();
    Ok(PiecewiseLoss {
        range: alpha_range,
        critical_points,
        piece_losses,
    })
}

/// [`linucb_dual_on_tape`] on a tape of `horizon` rounds drawn from `seed`.
pub fn linucb_dual(
    instance: &ContextualInstance,
    alpha_range: (f64, f64),
    horizon: usize,
    seed: u64,
    cap: usize,
) -> Result<PiecewiseLoss> {
    let tape = instance.draw(horizon, seed)?;
    linucb_dual_on_tape(&tape, alpha_range, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::run_linucb_on_tape;

    fn instance() -> ContextualInstance {
        ContextualInstance {
            dim: 2,
            context_means: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.6, 0.6]],
            context_sd: 0.4,
            theta_star: vec![0.5, 0.4],
            noise_sd: 0.3,
        }
    }

    #[test]
    fn envelope_of_two_lines() {
        let scores = [ArmScore { mean: 1.0, width: 0.5 }, ArmScore { mean: 0.0, width: 1.5 }];
        assert_eq!(envelope(&scores, 0.0, 3.0), vec![(0.0, 1.0, 0), (1.0, 3.0, 1)]);
        assert_eq!(envelope(&scores, 1.0, 3.0), vec![(1.0, 3.0, 1)]);
        assert_eq!(envelope(&scores, 0.0, 1.0), vec![(0.0, 1.0, 0)]);
    }

    #[test]
    fn matches_direct_runs() {
        let inst = instance();
        for seed in 0..3 {
            let tape = inst.draw(30, seed).unwrap();
            let f = linucb_dual_on_tape(&tape, (0.0, 3.0), DEFAULT_INTERVAL_CAP).unwrap();
            assert!(f.critical_points.windows(2).all(|w| w[0] < w[1]));
            for k in 0..600 {
                let alpha = 3.0 * (k as f64 + 0.5) / 600.0;
                let direct = run_linucb_on_tape(&tape, alpha).unwrap().pseudo_regret().unwrap() / 30.0;
                assert!((f.eval(alpha) - direct).abs() < 1e-9, "seed {seed} alpha {alpha}");
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let tape = instance().draw(40, 1).unwrap();
        match linucb_dual_on_tape(&tape, (0.0, 50.0), 2) {
            Err(Error::Resource(_)) => {}
            other => panic!("expected resource error, got {other:?}"),
        }
    }
}
