use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A function on a finite grid observed with additive Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpInstance {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    /// Variance of the observation noise actually applied.
    pub noise_var: f64,
    /// Bound `H` on `|f|`.
    pub bound: f64,
}

impl GpInstance {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>, noise_var: f64, bound: f64) -> Result<Self> {
        let inst = Self {
            points,
            values,
            noise_var,
            bound,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Samples `f` on an `m x m` grid over `[lo, hi]^2`.
    pub fn grid_2d(
        f: impl Fn(f64, f64) -> f64,
        lo: f64,
        hi: f64,
        m: usize,
        noise_var: f64,
        bound: f64,
    ) -> Result<Self> {
        let step = if m > 1 { (hi - lo) / (m - 1) as f64 } else { 0.0 };
        let mut points = Vec::with_capacity(m * m);
        let mut values = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                let (x, y) = (lo + a as f64 * step, lo + b as f64 * step);
                points.push(vec![x, y]);
                values.push(f(x, y));
            }
        }
        Self::new(points, values, noise_var, bound)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() || self.points.len() != self.values.len() {
            return domain("grid must be nonempty with one value per point");
        }
        let d = self.points[0].len();
        if d == 0
            || self
                .points
                .iter()
                .any(|p| p.len() != d || p.iter().any(|x| !x.is_finite()))
        {
            return domain("grid points must share a positive dimension and be finite");
        }
        if let Some(v) = self.values.iter().find(|v| !(v.is_finite() && v.abs() <= self.bound)) {
            return domain(format!("function value {v} outside [-{0}, {0}]", self.bound));
        }
        if !(self.noise_var >= 0.0) {
            return domain("noise variance must be nonnegative");
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the maximizer (lowest index on ties).
    pub fn best_index(&self) -> usize {
        crate::argmax_first(&self.values)
    }
}
