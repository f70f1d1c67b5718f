use serde::{Deserialize, Serialize};

use crate::env::{ArmDistribution, BanditInstance};
use crate::error::{domain, Error, Result};

/// Smallest KL divergence from `N(0, V)` to a Gaussian with mean `delta` and
/// variance at most `cap^2`.
///
/// With `cap^2 >= V + delta^2` the optimum is `1/2 ln(1 + delta^2 / V)`;
/// otherwise the variance constraint binds at `cap`.
pub fn kl_inf_gaussian(delta: f64, variance: f64, cap: f64) -> Result<f64> {
    if !(variance > 0.0 && variance.is_finite()) {
        return domain(format!("variance {variance} must be positive"));
    }
    if !(delta >= 0.0) || !(cap > 0.0) {
        return domain(format!("need delta >= 0 and cap > 0, got {delta}, {cap}"));
    }
    let target = variance + delta * delta;
    let cap2 = cap * cap;
    if cap2 >= target {
        Ok(0.5 * (delta * delta / variance).ln_1p())
    } else {
        Ok(0.5 * (cap2 / variance).ln() + target / (2.0 * cap2) - 0.5)
    }
}

/// Per-arm ingredients and total of the Gaussian regret lower-bound constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub gaps: Vec<f64>,
    pub variances: Vec<f64>,
    /// `2 gap / ln(1 + gap^2 / V)`, zero for optimal arms.
    pub terms: Vec<f64>,
    pub kl_inf: Vec<f64>,
    pub total: f64,
    pub cap_squared: f64,
    /// Whether `cap^2 > gap^2 + V` for every arm.
    pub cap_is_loose: bool,
}

/// The constant multiplying `ln T` in the lower bound on the regret of any
/// consistent algorithm on a Gaussian instance.
pub fn lower_bound_constant(instance: &BanditInstance, cap: f64) -> Result<LowerBoundReport> {
    let mut means = Vec::with_capacity(instance.n_arms());
    let mut variances = Vec::with_capacity(instance.n_arms());
    for (i, arm) in instance.arms.iter().enumerate() {
        match arm {
            ArmDistribution::Gaussian { mu, sigma } if *sigma > 0.0 => {
                means.push(*mu);
                variances.push(sigma * sigma);
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "arm {i} is not a Gaussian with positive variance"
                )))
            }
        }
    }
    let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let gaps: Vec<f64> = means.iter().map(|m| best - m).collect();
    let mut terms = Vec::with_capacity(gaps.len());
    let mut kl_inf = Vec::with_capacity(gaps.len());
    for (&gap, &v) in gaps.iter().zip(&variances) {
        kl_inf.push(kl_inf_gaussian(gap, v, cap)?);
        terms.push(if gap > 0.0 {
            2.0 * gap / (gap * gap / v).ln_1p()
        } else {
            0.0
        });
    }
    let cap_squared = cap * cap;
    let cap_is_loose = gaps.iter().zip(&variances).all(|(g, v)| cap_squared > g * g + v);
    Ok(LowerBoundReport {
        total: terms.iter().sum(),
        gaps,
        variances,
        terms,
        kl_inf,
        cap_squared,
        cap_is_loose,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gaussians(means: &[f64], sd: &[f64]) -> BanditInstance {
        let arms = means
            .iter()
            .zip(sd)
            .map(|(&m, &s)| ArmDistribution::gaussian(m, s))
            .collect();
        BanditInstance::new(arms, "g").unwrap()
    }

    #[test]
    fn closed_form_values() {
        assert!((kl_inf_gaussian(1.0, 1.0, 1e6).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(kl_inf_gaussian(0.0, 2.0, 10.0).unwrap(), 0.0);
        assert!((kl_inf_gaussian(1.0, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(kl_inf_gaussian(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn binding_cap_matches_numerical_minimum() {
        // Minimize the KL objective over sigma in (0, cap] on a fine grid.
        for &(delta, v, cap) in &[(1.0, 1.0, 1.0), (2.0, 0.5, 1.5), (0.3, 2.0, 1.2)] {
            let f = |s2: f64| 0.5 * (s2 / v).ln() + (v + delta * delta) / (2.0 * s2) - 0.5;
            let n = 200_000;
            let numeric = (1..=n)
                .map(|k| f((cap * k as f64 / n as f64).powi(2)))
                .fold(f64::INFINITY, f64::min);
            let closed = kl_inf_gaussian(delta, v, cap).unwrap();
            assert!(
                (closed - numeric).abs() < 1e-6,
                "{delta} {v} {cap}: {closed} vs {numeric}"
            );
        }
    }

    #[test]
    fn constants() {
        let two = lower_bound_constant(&gaussians(&[1.0, 0.0], &[1.0, 1.0]), 100.0).unwrap();
        assert!((two.total - 2.0 / 2f64.ln()).abs() < 1e-12);
        let three = lower_bound_constant(&gaussians(&[1.0, 0.5, 0.0], &[1.0, 1.0, 1.0]), 100.0).unwrap();
        let expected = 2.0 * 0.5 / 1.25f64.ln() + 2.0 / 2f64.ln();
        assert!((three.total - expected).abs() < 1e-12);
        let flat = lower_bound_constant(&gaussians(&[0.2, 0.2], &[1.0, 3.0]), 100.0).unwrap();
        assert_eq!(flat.total, 0.0);
        let from_kl: f64 = three
            .gaps
            .iter()
            .zip(&three.kl_inf)
            .filter(|(g, _)| **g > 0.0)
            .map(|(g, k)| g / k)
            .sum();
        assert!((three.total - from_kl).abs() < 1e-12);
        assert!(three.cap_is_loose);
    }

    #[test]
    fn non_gaussian_rejected() {
        let inst = BanditInstance::new(
            vec![ArmDistribution::bernoulli(0.5), ArmDistribution::gaussian(0.0, 1.0)],
            "mix",
        )
        .unwrap();
        assert!(matches!(lower_bound_constant(&inst, 10.0), Err(Error::Unsupported(_))));
    }

    proptest! {
        #[test]
        fn monotone(d1 in 0.0f64..3.0, d2 in 0.0f64..3.0, v1 in 0.1f64..4.0, v2 in 0.1f64..4.0, cap in 0.5f64..5.0) {
            let (dl, dh) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
            let (vl, vh) = if v1 < v2 { (v1, v2) } else { (v2, v1) };
            prop_assert!(kl_inf_gaussian(dl, vl, cap).unwrap() <= kl_inf_gaussian(dh, vl, cap).unwrap() + 1e-12);
            prop_assert!(kl_inf_gaussian(dl, vh, 1e6).unwrap() <= kl_inf_gaussian(dl, vl, 1e6).unwrap() + 1e-12);
        }
    }
}
