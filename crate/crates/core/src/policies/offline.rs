use super::ucb::{check_horizon, play_right_limit, UcbState};
use crate::env::{draw_tape, BanditInstance, LazyTape, RewardTape};
use crate::error::{domain, Result};

/// Uniform collection: `horizon` rewards from every arm (`n * horizon` pulls).
pub fn collect_offline_uniform(instance: &BanditInstance, horizon: usize, seed: u64) -> Result<RewardTape> {
    draw_tape(instance, horizon, seed)
}

/// Output of [`collect_offline_piecewise`].
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineCollection {
    /// Every reward drawn; arms may have different lengths.
    pub tape: RewardTape,
    /// The constant pieces of the dual loss, left to right, one run each.
    pub pieces: Vec<(f64, f64)>,
    /// Total rewards drawn (`T_o`).
    pub total_pulls: usize,
}

pub(crate) fn check_range(lo: f64, hi: f64) -> Result<()> {
    if lo >= 0.0 && lo < hi && hi.is_finite() {
        Ok(())
    } else {
        domain(format!("parameter range [{lo}, {hi}] must satisfy 0 <= lo < hi < inf"))
    }
}

/// Piece-by-piece collection: runs UCB once inside every constant piece of
/// the dual loss over `[alpha_lo, alpha_hi]`, restarting after `horizon`
/// rounds, and draws a new reward only when a run pulls an arm past the end
/// of its tape so far.
///
/// The pieces are discovered left to right: a run at the left end of a piece
/// (ties resolved toward larger alpha) also reports the first alpha at which
/// any of its decisions would change, which is where the next piece starts.
pub fn collect_offline_piecewise(
    instance: &BanditInstance,
    alpha_range: (f64, f64),
    horizon: usize,
    seed: u64,
) -> Result<OfflineCollection> {
    let (lo, hi) = alpha_range;
    check_range(lo, hi)?;
    instance.validate()?;
    let n = instance.n_arms();
    check_horizon(n, horizon)?;
    let mut lazy = LazyTape::new(instance, seed);
    let mut pieces = Vec::new();
    let mut start = lo;
    loop {
        let state = UcbState::after_init(n, &mut lazy)?;
        let (_, next) = play_right_limit(state, &mut lazy, start, horizon)?;
        match next {
            Some(c) if c < hi => {
                pieces.push((start, c));
                start = c;
            }
            _ => {
                pieces.push((start, hi));
                break;
            }
        }
    }
    let total_pulls = lazy.drawn();
    Ok(OfflineCollection {
        tape: lazy.into_tape(),
        pieces,
        total_pulls,
    })
}
