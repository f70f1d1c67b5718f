//! Parameterized bandit policies and offline data-collection policies.

mod gp_ucb;
mod linucb;
mod offline;
mod record;
mod ucb;

pub use gp_ucb::{gp_posterior, run_gpucb, BetaSchedule, GpState, GpUcbConfig, Kernel, Posterior};
pub use linucb::{run_linucb, run_linucb_on_tape, LinUcbState};
pub use offline::{collect_offline_piecewise, collect_offline_uniform, OfflineCollection};
pub use record::RunRecord;
pub use ucb::{run_ucb, run_ucb_with_prior, ucb_index, PriorSpec, UcbState};

pub(crate) use linucb::{round_contexts, round_regret, ArmScore};
pub(crate) use offline::check_range;
pub(crate) use ucb::{check_horizon, nearly_equal};
