use std::io::Write;

use crate::error::Result;

/// Trace of one policy run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Hyperparameter the run used (alpha, LinUCB width, or GP noise `s`).
    pub param: f64,
    /// Arm (or grid point) chosen in each round, 0-based.
    pub choices: Vec<usize>,
    pub rewards: Vec<f64>,
    /// Cumulative pseudo-regret after each round, when true means are known.
    pub cum_regret: Option<Vec<f64>>,
}

impl RunRecord {
    pub(crate) fn with_capacity(param: f64, horizon: usize, track_regret: bool) -> Self {
        Self {
            param,
            choices: Vec::with_capacity(horizon),
            rewards: Vec::with_capacity(horizon),
            cum_regret: track_regret.then(|| Vec::with_capacity(horizon)),
        }
    }

    pub(crate) fn push(&mut self, choice: usize, reward: f64, regret: Option<f64>) {
        self.choices.push(choice);
        self.rewards.push(reward);
        if let (Some(trace), Some(r)) = (self.cum_regret.as_mut(), regret) {
            let prev = trace.last().copied().unwrap_or(0.0);
            trace.push(prev + r);
        }
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    /// Final cumulative pseudo-regret.
    pub fn pseudo_regret(&self) -> Option<f64> {
        self.cum_regret.as_ref().map(|t| t.last().copied().unwrap_or(0.0))
    }

    pub fn total_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }

    /// Writes `round,choice,reward,cum_pseudo_regret` rows (1-based rounds).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["round", "choice", "reward", "cum_pseudo_regret"])?;
        for t in 0..self.len() {
            let regret = self.cum_regret.as_ref().map(|r| r[t].to_string()).unwrap_or_default();
            w.write_record([
                (t + 1).to_string(),
                self.choices[t].to_string(),
                self.rewards[t].to_string(),
                regret,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
