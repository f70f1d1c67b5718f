/// Sampling distributions this far below zero are treated as degenerate.
const DEGENERATE: f64 = 1e-12;

/// Log-barrier mirror descent with per-learner increasing learning rates.
#[derive(Debug, Clone, PartialEq)]
pub struct LogBarrier {
    /// Mirror-descent iterate.
    pub p: Vec<f64>,
    /// Sampling distribution `(1 - gamma) p + gamma / M`.
    pub p_bar: Vec<f64>,
    pub eta: Vec<f64>,
    /// Thresholds on `1 / p_bar` that trigger a learning-rate increase.
    pub rho: Vec<f64>,
    pub gamma: f64,
    pub beta: f64,
}

impl LogBarrier {
    /// Theory defaults for `m` learners over `horizon` rounds with unit-range losses.
    pub fn new(m: usize, horizon: usize) -> Self {
        let t = horizon as f64;
        let log_t = t.ln().max(1.0);
        let eta = (1.0 / (40.0 * t.sqrt() * log_t)).min(1.0 / (m as f64 * t).sqrt());
        let uniform = vec![1.0 / m as f64; m];
        Self {
            p: uniform.clone(),
            p_bar: uniform,
            eta: vec![eta; m],
            rho: vec![2.0 * m as f64; m],
            gamma: 1.0 / t,
            beta: (1.0 / log_t).exp(),
        }
    }

    /// One step with loss `loss` observed for learner `chosen`.
    pub fn update(&mut self, chosen: usize, loss: f64) {
        let m = self.p.len();
        let mut est = vec![0.0; m];
        est[chosen] = loss / self.p_bar[chosen];
        self.p = log_barrier_step(&self.p, &est, &self.eta);
        repair(&mut self.p);
        for i in 0..m {
            self.p_bar[i] = (1.0 - self.gamma) * self.p[i] + self.gamma / m as f64;
            if 1.0 / self.p_bar[i] > self.rho[i] {
                self.rho[i] = 2.0 / self.p_bar[i];
                self.eta[i] *= self.beta;
            }
        }
    }
}

/// `argmin_q <q, est> + sum_i (1/eta_i) ln(p_i / q_i) + q_i / p_i` over the simplex:
/// `q_i = 1 / (1/p_i + eta_i (est_i - lambda))` with `lambda` making `q` sum to one.
fn log_barrier_step(p: &[f64], est: &[f64], eta: &[f64]) -> Vec<f64> {
    let q = |lambda: f64| -> Vec<f64> {
        p.iter()
            .zip(est)
            .zip(eta)
            .map(|((&pi, &li), &ei)| 1.0 / (1.0 / pi + ei * (li - lambda)))
            .collect()
    };
    // The total is increasing in lambda, at most 1 at min(est) and unbounded at the first pole.
    let pole = p
        .iter()
        .zip(est)
        .zip(eta)
        .map(|((&pi, &li), &ei)| li + 1.0 / (pi * ei))
        .fold(f64::INFINITY, f64::min);
    let max_est = est.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut lo = est.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = max_est.min(pole);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if q(mid).iter().sum::<f64>() > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    q(lo)
}

/// 1/2-Tsallis-INF with importance-weighted loss estimates and `eta_t = 2 / sqrt(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TsallisInf {
    pub cum_est: Vec<f64>,
    pub p: Vec<f64>,
    pub round: usize,
}

impl TsallisInf {
    pub fn new(m: usize) -> Self {
        Self {
            cum_est: vec![0.0; m],
            p: vec![1.0 / m as f64; m],
            round: 1,
        }
    }

    pub fn update(&mut self, chosen: usize, loss: f64) {
        self.cum_est[chosen] += loss / self.p[chosen];
        self.round += 1;
        let eta = 2.0 / (self.round as f64).sqrt();
        self.p = tsallis_weights(&self.cum_est, eta);
        repair(&mut self.p);
    }
}

/// `w_i = 4 / (eta (L_i - x))^2` with `x < min L` normalizing the weights.
fn tsallis_weights(cum: &[f64], eta: f64) -> Vec<f64> {
    let m = cum.len() as f64;
    let min = cum.iter().copied().fold(f64::INFINITY, f64::min);
    let w = |x: f64| -> Vec<f64> { cum.iter().map(|&l| 4.0 / (eta * (l - x)).powi(2)).collect() };
    // At min - 2/eta the leader alone has weight 1; at min - 2 sqrt(M)/eta every weight is at most 1/M.
    let mut hi = min - 2.0 / eta;
    let mut lo = min - 2.0 * m.sqrt() / eta;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if w(mid).iter().sum::<f64>() > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    w(lo)
}

/// Clamps tiny or negative entries and renormalizes.
fn repair(p: &mut [f64]) {
    if p.iter().any(|&x| !(x >= DEGENERATE)) {
        log::warn!("meta distribution degenerate; clamping entries below {DEGENERATE}");
        for x in p.iter_mut() {
            if !(*x >= DEGENERATE) {
                *x = DEGENERATE;
            }
        }
    }
    let s: f64 = p.iter().sum();
    for x in p.iter_mut() {
        *x /= s;
    }
}

/// The meta-learner of a corralling run.
#[derive(Debug, Clone, PartialEq)]
pub enum MetaLearner {
    LogBarrier(LogBarrier),
    TsallisInf(TsallisInf),
}

impl MetaLearner {
    pub fn sampling(&self) -> &[f64] {
        match self {
            Self::LogBarrier(lb) => &lb.p_bar,
            Self::TsallisInf(ts) => &ts.p,
        }
    }

    pub fn update(&mut self, chosen: usize, loss: f64) {
        match self {
            Self::LogBarrier(lb) => lb.update(chosen, loss),
            Self::TsallisInf(ts) => ts.update(chosen, loss),
        }
    }
}
