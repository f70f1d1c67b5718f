use std::collections::BTreeMap;
use std::path::Path;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Deserialize;

use super::instance::BanditInstance;
use crate::error::{Error, Result};
use crate::rng::{ids, stream, Stream};

/// Pre-drawn rewards: `per_arm[i][j]` is the reward revealed on the `j`-th pull of arm `i`.
///
/// Arms may hold different numbers of entries (tapes grown lazily by an
/// offline collection policy are ragged).
#[derive(Debug, Clone, PartialEq)]
pub struct RewardTape {
    pub per_arm: Vec<Vec<f64>>,
    pub seed: u64,
}

impl RewardTape {
    pub fn new(per_arm: Vec<Vec<f64>>, seed: u64) -> Self {
        Self { per_arm, seed }
    }

    pub fn n_arms(&self) -> usize {
        self.per_arm.len()
    }

    /// Number of entries available for the shortest arm.
    pub fn min_len(&self) -> usize {
        self.per_arm.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn total_len(&self) -> usize {
        self.per_arm.iter().map(Vec::len).sum()
    }

    pub fn get(&self, arm: usize, pull: usize) -> Result<f64> {
        self.per_arm[arm]
            .get(pull)
            .copied()
            .ok_or(Error::TapeUnderflow { arm, pulls: pull })
    }

    /// Sum of the first `len` rewards of each arm.
    pub fn prefix_sums(&self, len: usize) -> Result<Vec<f64>> {
        self.per_arm
            .iter()
            .enumerate()
            .map(|(arm, r)| {
                if r.len() < len {
                    Err(Error::TapeUnderflow { arm, pulls: r.len() })
                } else {
                    Ok(r[..len].iter().sum())
                }
            })
            .collect()
    }
}

/// The uniform coins of arm `arm` under `seed`, in pull order.
pub fn coin_stream(seed: u64, arm: usize) -> impl Iterator<Item = f64> {
    let mut rng = stream(seed, ids::ARM_BASE + arm as u64);
    std::iter::repeat_with(move || rng.sample::<f64, _>(Open01))
}

/// A tape that draws rewards on demand.
///
/// Entry `(i, j)` is always `F_i^{-1}(z_ij)` with `z_i` the coin stream of arm
/// `i`, so a lazily grown tape is a prefix of the fully drawn one.
pub struct LazyTape<'a> {
    instance: &'a BanditInstance,
    seed: u64,
    streams: Vec<Stream>,
    drawn: Vec<Vec<f64>>,
}

impl<'a> LazyTape<'a> {
    pub fn new(instance: &'a BanditInstance, seed: u64) -> Self {
        let n = instance.n_arms();
        Self {
            instance,
            seed,
            streams: (0..n).map(|i| stream(seed, ids::ARM_BASE + i as u64)).collect(),
            drawn: vec![Vec::new(); n],
        }
    }

    pub fn get(&mut self, arm: usize, pull: usize) -> f64 {
        while self.drawn[arm].len() <= pull {
            let z: f64 = self.streams[arm].sample(Open01);
            let reward = self.instance.arms[arm].inverse_cdf(z).expect("open-interval coin");
            self.drawn[arm].push(self.instance.clip(reward));
        }
        self.drawn[arm][pull]
    }

    pub fn drawn(&self) -> usize {
        self.drawn.iter().map(Vec::len).sum()
    }

    pub fn into_tape(self) -> RewardTape {
        RewardTape::new(self.drawn, self.seed)
    }
}

/// Draws `pulls_per_arm` rewards for every arm; deterministic in `seed`.
pub fn draw_tape(instance: &BanditInstance, pulls_per_arm: usize, seed: u64) -> Result<RewardTape> {
    instance.validate()?;
    let mut lazy = LazyTape::new(instance, seed);
    if pulls_per_arm > 0 {
        for arm in 0..instance.n_arms() {
            lazy.get(arm, pulls_per_arm - 1);
        }
    }
    Ok(lazy.into_tape())
}

/// Gaussian-surrogate extension of short real reward logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateExtension {
    /// Target number of rewards per arm.
    pub horizon: usize,
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
struct LogRow {
    task_id: String,
    arm_id: usize,
    pull_index: usize,
    reward: f64,
}

/// Reads offline reward logs (`task_id,arm_id,pull_index,reward`).
///
/// Tasks are returned in order of first appearance. Row numbers in errors
/// are file line numbers (the header is line 1).
pub fn load_tapes(path: impl AsRef<Path>, extension: Option<SurrogateExtension>) -> Result<Vec<(String, RewardTape)>> {
    let reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    read_tapes(reader, extension)
}

/// arm -> pull index -> (reward, CSV row).
type ArmPulls = BTreeMap<usize, BTreeMap<usize, (f64, usize)>>;

/// [`load_tapes`] on an open CSV reader.
pub fn read_tapes<R: std::io::Read>(
    mut reader: csv::Reader<R>,
    extension: Option<SurrogateExtension>,
) -> Result<Vec<(String, RewardTape)>> {
    let headers = reader.headers()?.clone();
    for required in ["task_id", "arm_id", "pull_index", "reward"] {
        if !headers.iter().any(|h| h == required) {
            return Err(Error::Parse {
                row: 1,
                msg: format!("missing column `{required}`"),
            });
        }
    }

    let mut order: Vec<String> = Vec::new();
    let mut tasks: BTreeMap<String, ArmPulls> = BTreeMap::new();
    for (k, record) in reader.deserialize::<LogRow>().enumerate() {
        let row = k + 2;
        let rec = record.map_err(|e| Error::Parse {
            row,
            msg: e.to_string(),
        })?;
        if !rec.reward.is_finite() {
            return Err(Error::Parse {
                row,
                msg: format!("reward `{}` is not finite", rec.reward),
            });
        }
        if !tasks.contains_key(&rec.task_id) {
            order.push(rec.task_id.clone());
        }
        let pulls = tasks.entry(rec.task_id).or_default().entry(rec.arm_id).or_default();
        if pulls.insert(rec.pull_index, (rec.reward, row)).is_some() {
            return Err(Error::Parse {
                row,
                msg: format!("duplicate pull_index {}", rec.pull_index),
            });
        }
    }

    let mut out = Vec::with_capacity(order.len());
    for (t, task_id) in order.into_iter().enumerate() {
        let arms = &tasks[&task_id];
        let n_arms = arms.keys().next_back().map_or(0, |a| a + 1);
        let mut per_arm = Vec::with_capacity(n_arms);
        for arm in 0..n_arms {
            let pulls = arms.get(&arm).ok_or_else(|| Error::Parse {
                row: 1,
                msg: format!("task `{task_id}` has no rows for arm {arm}"),
            })?;
            let mut seq = Vec::with_capacity(pulls.len());
            for (expected, (&idx, &(reward, row))) in pulls.iter().enumerate() {
                if idx != expected {
                    return Err(Error::Parse {
                        row,
                        msg: format!(
                            "task `{task_id}` arm {arm}: pull_index {idx} follows {}; indices must be contiguous from 0",
                            expected as i64 - 1
                        ),
                    });
                }
                seq.push(reward);
            }
            per_arm.push(seq);
        }
        let seed = extension.map_or(0, |e| crate::rng::derive_seed(e.seed, t as u64));
        if let Some(ext) = extension {
            extend_with_surrogate(&mut per_arm, ext.horizon, seed);
        }
        out.push((task_id, RewardTape::new(per_arm, seed)));
    }
    Ok(out)
}

/// Writes tapes as `task_id,arm_id,pull_index,reward` rows, readable by [`read_tapes`].
pub fn write_tapes<W: std::io::Write>(tasks: &[(String, RewardTape)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["task_id", "arm_id", "pull_index", "reward"])?;
    for (task_id, tape) in tasks {
        for (arm, rewards) in tape.per_arm.iter().enumerate() {
            for (pull, r) in rewards.iter().enumerate() {
                w.write_record([task_id.clone(), arm.to_string(), pull.to_string(), r.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Appends Gaussian draws matching each arm's empirical mean and standard deviation.
fn extend_with_surrogate(per_arm: &mut [Vec<f64>], horizon: usize, seed: u64) {
    for (arm, seq) in per_arm.iter_mut().enumerate() {
        if seq.len() >= horizon || seq.is_empty() {
            continue;
        }
        let n = seq.len() as f64;
        let mean = seq.iter().sum::<f64>() / n;
        let sd = if seq.len() > 1 {
            (seq.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let normal = Normal::new(mean, sd).expect("finite moments");
        let mut rng = stream(seed, ids::SURROGATE + ((arm as u64) << 8));
        while seq.len() < horizon {
            seq.push(normal.sample(&mut rng));
        }
    }
}
