use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{purpose, sample_tasks};
use crate::dual::{normalize_points, piecewise_dual_ucb, run_loss, PiecewiseLoss};
use crate::env::TaskDistribution;
use crate::error::{config, Result};
use crate::policies::run_ucb;
use crate::rng::derive_seed;

/// Where a regret curve is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CurveMode {
    /// Fixed parameter values.
    Grid { points: Vec<f64> },
    /// One point per piece of the common refinement of all tasks' dual losses.
    Piecewise { lo: f64, hi: f64 },
}

/// Mean and standard error of per-task loss along a parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretCurve {
    pub params: Vec<f64>,
    pub mean_loss: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_tasks: usize,
    pub horizon: usize,
}

impl RegretCurve {
    /// Parameter with the smallest mean loss (first on ties).
    pub fn argmin(&self) -> f64 {
        let mut best = 0;
        for (i, m) in self.mean_loss.iter().enumerate() {
            if *m < self.mean_loss[best] {
                best = i;
            }
        }
        self.params[best]
    }

    /// Writes `param,mean_loss,stderr` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["param", "mean_loss", "stderr"])?;
        for i in 0..self.params.len() {
            w.write_record([
                self.params[i].to_string(),
                self.mean_loss[i].to_string(),
                self.stderr[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Average regret of UCB(alpha) over `n_tasks` tasks from `dist`.
pub fn regret_curve(
    dist: &TaskDistribution,
    mode: &CurveMode,
    n_tasks: usize,
    horizon: usize,
    seed: u64,
) -> Result<RegretCurve> {
    if n_tasks < 2 {
        return config("a regret curve needs at least two tasks");
    }
    let tasks = sample_tasks(dist, n_tasks, horizon, derive_seed(seed, purpose::CURVE))?;
    // Per parameter, the per-task losses in task order.
    let (params, losses): (Vec<f64>, Vec<Vec<f64>>) = match mode {
        CurveMode::Grid { points } => {
            if points.is_empty() || points.windows(2).any(|w| !(w[0] < w[1])) {
                return config("curve grid must be nonempty and strictly increasing");
            }
            let losses = points
                .iter()
                .map(|&a| {
                    tasks
                        .par_iter()
                        .map(|t| {
                            let rec = run_ucb(&t.tape, a, horizon, t.true_means.as_deref())?;
                            run_loss(&rec, &t.tape, horizon)
                        })
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<_>>()?;
            (points.clone(), losses)
        }
        CurveMode::Piecewise { lo, hi } => {
            let duals: Vec<PiecewiseLoss> = tasks
                .par_iter()
                .map(|t| piecewise_dual_ucb(&t.tape, t.true_means.as_deref(), (*lo, *hi), horizon))
                .collect::<Result<_>>()?;
            let params = PiecewiseLoss {
                range: (*lo, *hi),
                critical_points: normalize_points(duals.iter().flat_map(|d| d.critical_points.clone()).collect()),
                piece_losses: Vec::new(),
            }
            .midpoints();
            let losses = params
                .iter()
                .map(|&a| duals.iter().map(|d| d.eval(a)).collect())
                .collect();
            (params, losses)
        }
    };
    let (mean_loss, stderr) = losses.iter().map(|l| crate::mean_and_stderr(l)).unzip();
    Ok(RegretCurve {
        params,
        mean_loss,
        stderr,
        n_tasks,
        horizon,
    })
}

/// Least-squares slope of `values` against `ln(horizons)`.
pub fn fit_log_slope(horizons: &[f64], values: &[f64]) -> f64 {
    let x: Vec<f64> = horizons.iter().map(|t| t.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = values.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(values).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{ArmDistribution, BanditInstance};

    #[test]
    fn point_mass_dominated_family_is_flat() {
        let inst = BanditInstance::new(
            vec![ArmDistribution::uniform(5.0, 6.0), ArmDistribution::uniform(0.0, 1.0)],
            "dom",
        )
        .unwrap();
        let dist = TaskDistribution::Custom { instances: vec![inst] };
        let curve = regret_curve(
            &dist,
            &CurveMode::Grid {
                points: vec![0.0, 0.05, 0.1],
            },
            3,
            40,
            1,
        )
        .unwrap();
        // Only the initialization pull of the bad arm costs anything.
        for m in &curve.mean_loss {
            assert!((m - 5.0 / 40.0).abs() < 1e-12);
        }
        assert!(curve.stderr.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn reproducible_and_piecewise_consistent() {
        let dist = TaskDistribution::Bernoulli {
            center: 0.5,
            sigma: 0.2,
        };
        let a = regret_curve(&dist, &CurveMode::Piecewise { lo: 0.0, hi: 1.0 }, 5, 40, 7).unwrap();
        let b = regret_curve(&dist, &CurveMode::Piecewise { lo: 0.0, hi: 1.0 }, 5, 40, 7).unwrap();
        assert_eq!(a, b);
        let grid = regret_curve(
            &dist,
            &CurveMode::Grid {
                points: a.params.clone(),
            },
            5,
            40,
            7,
        )
        .unwrap();
        assert_eq!(grid.mean_loss, a.mean_loss);
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("param,mean_loss,stderr\n"));
    }

    #[test]
    fn slope_of_exact_log() {
        let t = [10.0, 100.0, 1000.0];
        let v: Vec<f64> = t.iter().map(|x: &f64| 3.0 * x.ln() + 1.0).collect();
        assert!((fit_log_slope(&t, &v) - 3.0).abs() < 1e-12);
    }
}
