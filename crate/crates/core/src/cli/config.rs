use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::env::TaskDistribution;
use crate::error::{config, Error, Result};

/// Every setting a subcommand may read. The same names work as `--flags`
/// (kebab case) and as keys of a TOML config file (snake case); flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; required.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Task family: bernoulli, uniform, gaussian, gaussian_random_variance, symmetric_gaussian.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub center: Option<f64>,
    #[arg(long)]
    pub var_lo: Option<f64>,
    #[arg(long)]
    pub var_hi: Option<f64>,
    #[arg(long)]
    pub mu1: Option<f64>,
    #[arg(long)]
    pub mu2: Option<f64>,
    #[arg(long)]
    pub sd: Option<f64>,
    /// Offline reward logs (`task_id,arm_id,pull_index,reward`) used instead of a family.
    #[arg(long)]
    pub tapes: Option<PathBuf>,

    /// Online (test) horizon.
    #[arg(long)]
    pub t: Option<usize>,
    /// Offline (training) horizon.
    #[arg(long)]
    pub t_offline: Option<usize>,
    #[arg(long)]
    pub alpha_min: Option<f64>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub alpha_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub corral_grid: Option<Vec<f64>>,

    #[arg(long)]
    pub n_train: Option<usize>,
    #[arg(long)]
    pub n_test: Option<usize>,
    #[arg(long)]
    pub n_tasks: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub n_values: Option<Vec<usize>>,
    #[arg(long)]
    pub stride: Option<usize>,

    /// Candidate prior-mean levels; the prior grid is their product over arms.
    #[arg(long, value_delimiter = ',')]
    pub prior_levels: Option<Vec<f64>>,

    #[arg(long)]
    pub s_min: Option<f64>,
    #[arg(long)]
    pub s_max: Option<f64>,
    #[arg(long)]
    pub s_grid: Option<usize>,
    /// Points per axis of the GP domain grid.
    #[arg(long)]
    pub gp_side: Option<usize>,
    #[arg(long)]
    pub gp_noise_var: Option<f64>,
    #[arg(long)]
    pub lengthscale: Option<f64>,

    #[arg(long, value_delimiter = ',')]
    pub means: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub sds: Option<Vec<f64>>,
    /// Variance cap `B` of the lower bound.
    #[arg(long)]
    pub cap: Option<f64>,

    /// Offline collection policy: uniform or piecewise.
    #[arg(long)]
    pub policy: Option<String>,

    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Loss range `H`.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub log_qd: Option<f64>,
    #[arg(long)]
    pub n_arms: Option<usize>,

    /// Rewards are clamped to `[0, clip]` when set.
    #[arg(long)]
    pub clip: Option<f64>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),* $(,)?) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl ExperimentConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overlay(mut self, flags: &Self) -> Self {
        overlay!(
            self,
            flags,
            seed,
            out,
            family,
            sigma,
            center,
            var_lo,
            var_hi,
            mu1,
            mu2,
            sd,
            tapes,
            t,
            t_offline,
            alpha_min,
            alpha_max,
            alpha_grid,
            corral_grid,
            n_train,
            n_test,
            n_tasks,
            samples,
            trials,
            n_values,
            stride,
            prior_levels,
            s_min,
            s_max,
            s_grid,
            gp_side,
            gp_noise_var,
            lengthscale,
            means,
            sds,
            cap,
            policy,
            epsilon,
            delta,
            h,
            log_qd,
            n_arms,
            clip,
        );
        self
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config("seed required (--seed or `seed` in the config file)".into()))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn alpha_range(&self) -> Result<(f64, f64)> {
        let lo = self.alpha_min.unwrap_or(0.0);
        let hi = need(self.alpha_max, "alpha_max")?;
        if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return config(format!("alpha_min/alpha_max: need 0 <= {lo} <= {hi}"));
        }
        Ok((lo, hi))
    }

    pub fn distribution(&self) -> Result<TaskDistribution> {
        let family = self
            .family
            .as_deref()
            .ok_or_else(|| Error::Config("family: required".into()))?;
        let sigma = || need(self.sigma, "sigma");
        let dist = match family {
            "bernoulli" => TaskDistribution::Bernoulli {
                center: self.center.unwrap_or(0.5),
                sigma: sigma()?,
            },
            "uniform" => TaskDistribution::Uniform { sigma: sigma()? },
            "gaussian" => TaskDistribution::Gaussian { sigma: sigma()? },
            "gaussian_random_variance" => TaskDistribution::GaussianRandomVariance {
                var_lo: self.var_lo.unwrap_or(0.5),
                var_hi: self.var_hi.unwrap_or(1.5),
            },
            "symmetric_gaussian" => TaskDistribution::SymmetricGaussian {
                mu1: need(self.mu1, "mu1")?,
                mu2: need(self.mu2, "mu2")?,
                sd: need(self.sd, "sd")?,
            },
            other => return config(format!("family: unknown family `{other}`")),
        };
        dist.validate()?;
        Ok(dist)
    }

    /// Checks that referenced files exist.
    pub fn check_files(&self) -> Result<()> {
        if let Some(p) = &self.tapes {
            if !p.is_file() {
                return config(format!("tapes: file {} does not exist", p.display()));
            }
        }
        Ok(())
    }
}

pub(crate) fn need<T: Copy>(v: Option<T>, field: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("{field}: required")))
}
