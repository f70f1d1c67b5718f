use rayon::prelude::*;
use serde_json::json;

use super::{LearnedParam, TunerResult};
use crate::dual::{normalize_points, piecewise_dual_ucb, piecewise_dual_ucb_with_prior, run_loss, PiecewiseLoss};
use crate::env::{BanditInstance, RewardTape};
use crate::error::{config, Error, Result};
use crate::policies::{check_range, run_ucb, run_ucb_with_prior, PriorSpec};

/// One offline task: its reward tape and, for synthetic tasks, the true arm means.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineTask {
    pub tape: RewardTape,
    pub true_means: Option<Vec<f64>>,
}

impl OfflineTask {
    pub fn new(tape: RewardTape, true_means: Option<Vec<f64>>) -> Self {
        Self { tape, true_means }
    }

    pub fn from_instance(instance: &BanditInstance, tape: RewardTape) -> Self {
        Self {
            tape,
            true_means: instance.true_means.clone(),
        }
    }

    fn means(&self) -> Option<&[f64]> {
        self.true_means.as_deref()
    }
}

fn mean_in_order(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.sum::<f64>() / n as f64
}

struct Erm {
    alpha: f64,
    objective: f64,
    candidates: usize,
}

/// Minimizes the mean of `duals` over the range endpoints and one point per
/// piece of their common refinement; the smallest alpha wins ties.
///
/// Endpoint losses are supplied by direct replay since a piece's value need
/// not hold exactly at its boundary.
fn erm_over_pieces(duals: &[PiecewiseLoss], range: (f64, f64), at_lo: &[f64], at_hi: &[f64]) -> Erm {
    let n = duals.len();
    let all: Vec<f64> = duals.iter().flat_map(|d| d.critical_points.iter().copied()).collect();
    let global = PiecewiseLoss {
        range,
        critical_points: normalize_points(all),
        piece_losses: Vec::new(),
    };
    let mut best = Erm {
        alpha: range.0,
        objective: mean_in_order(at_lo.iter().copied(), n),
        candidates: 1,
    };
    for mid in global.midpoints() {
        let objective = mean_in_order(duals.iter().map(|d| d.eval(mid)), n);
        best.candidates += 1;
        if objective < best.objective {
            best.alpha = mid;
            best.objective = objective;
        }
    }
    let objective = mean_in_order(at_hi.iter().copied(), n);
    best.candidates += 1;
    if objective < best.objective {
        best.alpha = range.1;
        best.objective = objective;
    }
    best
}

fn at_param<T>(param: f64, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::AtParameter {
        param,
        source: Box::new(e),
    })
}

/// Learns UCB's exploration parameter by exact ERM over `alpha_range`.
///
/// Each task's loss is the average regret of UCB(alpha) over `horizon`
/// rounds of its tape (pseudo-regret when true means are known).
pub fn tuned_ucb(tasks: &[OfflineTask], alpha_range: (f64, f64), horizon: usize) -> Result<TunerResult> {
    if tasks.is_empty() {
        return config("need at least one offline task");
    }
    check_range(alpha_range.0, alpha_range.1)?;
    let duals: Vec<PiecewiseLoss> = tasks
        .par_iter()
        .map(|t| piecewise_dual_ucb(&t.tape, t.means(), alpha_range, horizon))
        .collect::<Result<_>>()?;
    let replay = |alpha: f64| -> Result<Vec<f64>> {
        tasks
            .par_iter()
            .map(|t| {
                at_param(
                    alpha,
                    run_loss(&run_ucb(&t.tape, alpha, horizon, t.means())?, &t.tape, horizon),
                )
            })
            .collect()
    };
    let erm = erm_over_pieces(&duals, alpha_range, &replay(alpha_range.0)?, &replay(alpha_range.1)?);
    Ok(TunerResult {
        param: LearnedParam::Alpha { alpha: erm.alpha },
        objective: erm.objective,
        candidates: erm.candidates,
        per_task_pieces: duals.iter().map(PiecewiseLoss::pieces).collect(),
        config: json!({ "method": "tuned_ucb", "alpha_range": alpha_range, "horizon": horizon, "tasks": tasks.len() }),
    })
}

/// Mean loss at each point of `grid` and the smallest minimizer.
///
/// `loss(task, rho)` evaluates one task; failures are reported with the grid
/// point attached.
pub fn grid_erm<F>(loss: F, n_tasks: usize, grid: &[f64]) -> Result<TunerResult>
where
    F: Fn(usize, f64) -> Result<f64> + Sync,
{
    if n_tasks == 0 || grid.is_empty() {
        return config("grid search needs at least one task and one grid point");
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return config("grid must be strictly increasing");
    }
    let curve: Vec<f64> = grid
        .iter()
        .map(|&rho| {
            let losses = (0..n_tasks)
                .into_par_iter()
                .map(|k| at_param(rho, loss(k, rho)))
                .collect::<Result<Vec<f64>>>()?;
            Ok(mean_in_order(losses.into_iter(), n_tasks))
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, v) in curve.iter().enumerate() {
        if *v < curve[best] {
            best = i;
        }
    }
    Ok(TunerResult {
        param: LearnedParam::Grid { value: grid[best] },
        objective: curve[best],
        candidates: grid.len(),
        per_task_pieces: Vec::new(),
        config: json!({ "method": "grid_erm", "grid": grid, "tasks": n_tasks }),
    })
}

/// Jointly learns the exploration parameter and prior means, searching
/// `prior_grid` exhaustively and alpha exactly for each prior.
pub fn tune_with_prior(
    tasks: &[OfflineTask],
    alpha_range: (f64, f64),
    prior_grid: &[PriorSpec],
    horizon: usize,
) -> Result<TunerResult> {
    if tasks.is_empty() || prior_grid.is_empty() {
        return config("need at least one offline task and one prior");
    }
    check_range(alpha_range.0, alpha_range.1)?;
    let n = tasks[0].tape.n_arms();
    if let Some(k) = tasks.iter().position(|t| t.tape.n_arms() != n) {
        return config(format!("task {k} has {} arms, expected {n}", tasks[k].tape.n_arms()));
    }
    for prior in prior_grid {
        prior.validate(n)?;
    }
    let mut best: Option<(usize, Erm)> = None;
    let mut candidates = 0;
    let mut pieces = Vec::new();
    for (p, prior) in prior_grid.iter().enumerate() {
        let duals: Vec<PiecewiseLoss> = tasks
            .par_iter()
            .map(|t| piecewise_dual_ucb_with_prior(&t.tape, t.means(), prior, alpha_range, horizon))
            .collect::<Result<_>>()?;
        let replay = |alpha: f64| -> Result<Vec<f64>> {
            tasks
                .par_iter()
                .map(|t| {
                    let rec = run_ucb_with_prior(&t.tape, alpha, prior, horizon, t.means());
                    at_param(alpha, run_loss(&rec?, &t.tape, horizon))
                })
                .collect()
        };
        let erm = erm_over_pieces(&duals, alpha_range, &replay(alpha_range.0)?, &replay(alpha_range.1)?);
        candidates += erm.candidates;
        pieces.extend(duals.iter().map(PiecewiseLoss::pieces));
        if best.as_ref().is_none_or(|(_, b)| erm.objective < b.objective) {
            best = Some((p, erm));
        }
    }
    let (p, erm) = best.expect("prior grid is nonempty");
    Ok(TunerResult {
        param: LearnedParam::AlphaPrior {
            alpha: erm.alpha,
            prior: prior_grid[p].0.clone(),
        },
        objective: erm.objective,
        candidates,
        per_task_pieces: pieces,
        config: json!({
            "method": "tune_with_prior",
            "alpha_range": alpha_range,
            "horizon": horizon,
            "tasks": tasks.len(),
            "priors": prior_grid.len(),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{draw_tape, sample_task_with_tape, ArmDistribution, TaskDistribution};
    use rand::{Rng, SeedableRng};

    fn bernoulli_tasks(n: usize, horizon: usize, seed: u64) -> Vec<OfflineTask> {
        let dist = TaskDistribution::Bernoulli {
            center: 0.5,
            sigma: 0.1,
        };
        (0..n)
            .map(|k| {
                let (inst, tape) = sample_task_with_tape(&dist, horizon, seed * 1000 + k as u64).unwrap();
                OfflineTask::from_instance(&inst, tape)
            })
            .collect()
    }

    fn direct_objective(tasks: &[OfflineTask], alpha: f64, horizon: usize) -> f64 {
        let losses: Vec<f64> = tasks
            .iter()
            .map(|t| run_loss(&run_ucb(&t.tape, alpha, horizon, t.means()).unwrap(), &t.tape, horizon).unwrap())
            .collect();
        losses.iter().sum::<f64>() / tasks.len() as f64
    }

    #[test]
    fn single_piece_returns_lower_end() {
        let tape = RewardTape::new(vec![vec![1.0; 20], vec![0.0; 20]], 0);
        // alpha ln 20 < 1 throughout, so the zero arm is never revisited.
        let res = tuned_ucb(&[OfflineTask::new(tape, Some(vec![1.0, 0.0]))], (0.05, 0.2), 20).unwrap();
        assert_eq!(res.param, LearnedParam::Alpha { alpha: 0.05 });
        assert_eq!(res.per_task_pieces, vec![1]);
        assert_eq!(res.candidates, 3);
    }

    #[test]
    fn objective_matches_recomputation_and_beats_probes() {
        let tasks = bernoulli_tasks(8, 60, 1);
        let res = tuned_ucb(&tasks, (0.0, 2.0), 60).unwrap();
        let alpha = res.param.value();
        assert!((0.0..=2.0).contains(&alpha));
        assert!((res.objective - direct_objective(&tasks, alpha, 60)).abs() <= 1e-12);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let probe = rng.random_range(0.0..2.0);
            assert!(res.objective <= direct_objective(&tasks, probe, 60) + 1e-12);
        }
    }

    #[test]
    fn empty_task_list_rejected() {
        assert!(tuned_ucb(&[], (0.0, 1.0), 10).is_err());
    }

    #[test]
    fn grid_erm_ties_go_low() {
        let res = grid_erm(|_, _| Ok(0.3), 4, &[0.1, 0.5, 2.0]).unwrap();
        assert_eq!(res.param.value(), 0.1);
        let res = grid_erm(|_, rho| Ok((rho - 1.0).abs()), 2, &[0.5]).unwrap();
        assert_eq!(res.param.value(), 0.5);
        assert!(grid_erm(|_, _| Ok(0.0), 1, &[]).is_err());
    }

    #[test]
    fn grid_erm_reports_failing_point() {
        let err = grid_erm(
            |_, rho| {
                if rho > 1.0 {
                    crate::error::domain("bad")
                } else {
                    Ok(0.0)
                }
            },
            2,
            &[0.5, 1.5],
        )
        .unwrap_err();
        match err {
            Error::AtParameter { param, .. } => assert_eq!(param, 1.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn grid_erm_agrees_with_exact_tuner() {
        let tasks = bernoulli_tasks(5, 50, 2);
        let exact = tuned_ucb(&tasks, (0.0, 1.0), 50).unwrap();
        let grid = [exact.param.value()];
        let res = grid_erm(
            |k, a| run_loss(&run_ucb(&tasks[k].tape, a, 50, tasks[k].means())?, &tasks[k].tape, 50),
            tasks.len(),
            &grid,
        )
        .unwrap();
        assert!((res.objective - exact.objective).abs() <= 1e-12);
    }

    #[test]
    fn prior_arm_mismatch_rejected() {
        let a = OfflineTask::new(RewardTape::new(vec![vec![0.0; 5]; 2], 0), None);
        let b = OfflineTask::new(RewardTape::new(vec![vec![0.0; 5]; 3], 0), None);
        let err = tune_with_prior(&[a, b], (0.0, 1.0), &[PriorSpec(vec![0.0, 0.0])], 5).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn exact_prior_on_separable_task() {
        let inst = BanditInstance::new(
            vec![ArmDistribution::uniform(0.9, 1.0), ArmDistribution::uniform(0.0, 0.1)],
            "sep",
        )
        .unwrap();
        let tape = draw_tape(&inst, 30, 4).unwrap();
        let task = OfflineTask::from_instance(&inst, tape);
        let prior = PriorSpec(inst.true_means.clone().unwrap());
        let res = tune_with_prior(&[task], (0.0, 1.0), std::slice::from_ref(&prior), 30).unwrap();
        assert_eq!(res.objective, 0.0);
        assert_eq!(
            res.param,
            LearnedParam::AlphaPrior {
                alpha: 0.0,
                prior: prior.0
            }
        );
    }
}
