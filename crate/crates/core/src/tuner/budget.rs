use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Constant multiplying `(H / eps)^2 (log Q + ln(1/delta))`.
pub const BUDGET_CONSTANT: f64 = 4.0;

/// Sufficient (not tight) numbers of offline tasks and pulls per task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBudget {
    pub epsilon: f64,
    pub delta: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub log_qd: f64,
    /// `C (H/eps)^2 (log Q + ln(1/delta))` before the `ln N` correction.
    pub leading: f64,
    /// Number of offline tasks.
    #[serde(rename = "N")]
    pub n: u64,
    /// Pulls per offline task.
    #[serde(rename = "T_o")]
    pub t_o: u64,
}

/// Tasks and pulls needed for an `epsilon`-optimal parameter with probability `1 - delta`.
///
/// `N` solves `N = C (H/eps)^2 (log Q + ln(1/delta) + ln N)` by two
/// fixed-point steps from the leading term; `T_o = min(n, Q) T`.
pub fn sample_budget(
    epsilon: f64,
    delta: f64,
    h: f64,
    log_qd: f64,
    n_arms: usize,
    horizon: usize,
) -> Result<SampleBudget> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return domain(format!("epsilon {epsilon} and delta {delta} must lie in (0, 1)"));
    }
    if !(h > 0.0 && h.is_finite()) || !(log_qd >= 0.0 && log_qd.is_finite()) {
        return domain(format!("H {h} must be positive and log Q {log_qd} nonnegative"));
    }
    let scale = BUDGET_CONSTANT * (h / epsilon).powi(2);
    let base = log_qd + (1.0 / delta).ln();
    let leading = scale * base;
    let step = |n: f64| scale * (base + n.max(1.0).ln());
    let n = step(step(leading)).ceil().max(1.0) as u64;
    let t_o = ((n_arms as f64).min(log_qd.exp()) * horizon as f64).ceil() as u64;
    Ok(SampleBudget {
        epsilon,
        delta,
        h,
        log_qd,
        leading,
        n,
        t_o,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Iterates the implicit bound to a fixed point.
    fn fixed_point(scale: f64, base: f64) -> f64 {
        let mut n = scale * base;
        for _ in 0..200 {
            n = scale * (base + n.max(1.0).ln());
        }
        n
    }

    #[test]
    fn thirty_pieces_example() {
        let b = sample_budget(0.1, 0.05, 1.0, 30f64.ln(), 2, 100).unwrap();
        let scale = 400.0;
        let base = 30f64.ln() + 20f64.ln();
        assert!((b.leading - scale * base).abs() < 1e-9);
        let exact = fixed_point(scale, base);
        assert!(b.n as f64 >= scale * base);
        assert!((b.n as f64 - exact).abs() / exact < 0.01, "{} vs {exact}", b.n);
        assert!((1000..10_000).contains(&b.n));
        assert_eq!(b.t_o, 200);
    }

    #[test]
    fn trivial_accuracy() {
        let b = sample_budget(0.5, 0.1, 0.5, 1.0, 3, 10).unwrap();
        let base = 1.0 + 10f64.ln();
        assert!(b.n as f64 <= 4.0 * base + 4.0 * (4.0 * base).ln() + 4.0);
        assert!(b.n >= 1);
        assert_eq!(b.t_o, 28);
    }

    #[test]
    fn leading_term_scales_with_h_squared() {
        let a = sample_budget(0.1, 0.05, 1.0, 2.0, 2, 10).unwrap();
        let b = sample_budget(0.1, 0.05, 2.0, 2.0, 2, 10).unwrap();
        assert!((b.leading - 4.0 * a.leading).abs() < 1e-9 * b.leading);
        assert!(b.n >= 4 * a.n);
    }

    #[test]
    fn monotone_in_inputs() {
        let mut prev = u64::MAX;
        for k in 1..20 {
            let n = sample_budget(0.04 * k as f64, 0.1, 1.0, 3.0, 2, 10).unwrap().n;
            assert!(n <= prev);
            prev = n;
        }
        let lo = sample_budget(0.1, 0.1, 1.0, 1.0, 2, 10).unwrap().n;
        let hi = sample_budget(0.1, 0.1, 1.0, 2.0, 2, 10).unwrap().n;
        assert!(hi >= lo);
    }

    #[test]
    fn domain_checks() {
        assert!(sample_budget(0.0, 0.1, 1.0, 1.0, 2, 10).is_err());
        assert!(sample_budget(0.1, 1.0, 1.0, 1.0, 2, 10).is_err());
        assert!(sample_budget(0.1, 0.1, -1.0, 1.0, 2, 10).is_err());
    }
}
