//! Derandomized dual losses: critical points of the hyperparameter-to-behavior map.

mod linucb;
mod piecewise;
mod qd;
mod ucb;

pub use linucb::{linucb_dual, linucb_dual_on_tape, DEFAULT_INTERVAL_CAP};
pub use piecewise::PiecewiseLoss;
pub use qd::{estimate_qd, piece_counts, QdEstimate};
pub use ucb::{alpha_critical_points, piecewise_dual_ucb, piecewise_dual_ucb_with_prior, ucb_critical_points};

pub(crate) use piecewise::normalize_points;
pub(crate) use ucb::run_loss;
