//! Problem instances, task families, derandomized reward tapes and offline log ingestion.

mod arm;
mod contextual;
mod gp;
mod instance;
mod tape;

pub use arm::ArmDistribution;
pub use contextual::{ContextDraw, ContextTape, ContextualInstance};
pub use gp::GpInstance;
pub use instance::{sample_task, BanditInstance, TaskDistribution};
pub use tape::{coin_stream, draw_tape, load_tapes, read_tapes, write_tapes, LazyTape, RewardTape, SurrogateExtension};

/// Draws a task and its tape together; `seed` feeds both through separate streams.
pub fn sample_task_with_tape(
    dist: &TaskDistribution,
    pulls_per_arm: usize,
    seed: u64,
) -> crate::Result<(BanditInstance, RewardTape)> {
    let inst = sample_task(dist, seed)?;
    let tape = draw_tape(&inst, pulls_per_arm, seed)?;
    Ok((inst, tape))
}
