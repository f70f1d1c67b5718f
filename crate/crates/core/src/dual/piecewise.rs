use std::io::Write;

use crate::error::Result;

/// A piecewise-constant function of one hyperparameter on `[lo, hi]`.
///
/// Piece `k` covers `[c_{k-1}, c_k)` with `c_0 = lo`; the last piece is
/// closed at `hi`. Adjacent pieces may carry equal losses: pieces mark
/// changes in the algorithm's behavior, not in the loss.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLoss {
    pub range: (f64, f64),
    /// Strictly increasing, strictly inside `range`.
    pub critical_points: Vec<f64>,
    /// One loss per piece.
    pub piece_losses: Vec<f64>,
}

impl PiecewiseLoss {
    pub fn pieces(&self) -> usize {
        self.piece_losses.len()
    }

    /// Index of the piece containing `x`.
    pub fn piece_index(&self, x: f64) -> usize {
        self.critical_points.partition_point(|&c| c <= x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.piece_losses[self.piece_index(x)]
    }

    /// Bounds of each piece.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        let mut bounds = Vec::with_capacity(self.critical_points.len() + 2);
        bounds.push(self.range.0);
        bounds.extend_from_slice(&self.critical_points);
        bounds.push(self.range.1);
        bounds.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.intervals().into_iter().map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// Writes `piece_index,alpha_lo,alpha_hi,loss` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["piece_index", "alpha_lo", "alpha_hi", "loss"])?;
        for (k, ((a, b), loss)) in self.intervals().into_iter().zip(&self.piece_losses).enumerate() {
            w.write_record([k.to_string(), a.to_string(), b.to_string(), loss.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sorts points and drops exact duplicates.
pub(crate) fn normalize_points(mut points: Vec<f64>) -> Vec<f64> {
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}
