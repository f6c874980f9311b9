use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::FeatureMatrix;
use crate::{Error, Result};

/// Per-column location and spread learned by [`standardize`].
///
/// Columns whose spread is numerically zero are only centered; they are
/// listed in `degenerate` and carry a divisor of 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingStats {
    pub means: Vec<f64>,
    pub std_devs: Vec<f64>,
    pub degenerate: Vec<bool>,
}

impl ScalingStats {
    fn divisor(&self, j: usize) -> f64 {
        if self.degenerate[j] {
            1.0
        } else {
            self.std_devs[j]
        }
    }

    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    pub fn has_degenerate(&self) -> bool {
        self.degenerate.iter().any(|&f| f)
    }

    /// Transform raw rows exactly as the training data was transformed.
    pub fn apply(&self, raw: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_width(raw.ncols())?;
        let mut out = raw.to_owned();
        for (j, mut col) in out.columns_mut().into_iter().enumerate() {
            let (m, s) = (self.means[j], self.divisor(j));
            col.mapv_inplace(|v| (v - m) / s);
        }
        Ok(out)
    }

    /// Transform a single raw row in place.
    pub fn apply_row(&self, row: &mut [f64]) -> Result<()> {
        self.check_width(row.len())?;
        for (j, v) in row.iter_mut().enumerate() {
            *v = (*v - self.means[j]) / self.divisor(j);
        }
        Ok(())
    }

    pub fn invert(&self, scaled: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_width(scaled.ncols())?;
        let mut out = scaled.to_owned();
        for (j, mut col) in out.columns_mut().into_iter().enumerate() {
            let (m, s) = (self.means[j], self.divisor(j));
            col.mapv_inplace(|v| v * s + m);
        }
        Ok(out)
    }

    fn check_width(&self, d: usize) -> Result<()> {
        if d != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                actual: d,
            });
        }
        Ok(())
    }
}

/// Center each column to mean 0 and scale it to unit population standard
/// deviation.
pub fn standardize(x: &FeatureMatrix) -> (FeatureMatrix, ScalingStats) {
    let a = x.as_array();
    let n = a.nrows() as f64;
    let mut means = Vec::with_capacity(a.ncols());
    let mut std_devs = Vec::with_capacity(a.ncols());
    let mut degenerate = Vec::with_capacity(a.ncols());
    for col in a.columns() {
        // Shifted by the first value so a constant column has an exact mean.
        let first = col[0];
        let mean = first + col.iter().map(|v| v - first).sum::<f64>() / n;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let sd = var.sqrt();
        means.push(mean);
        std_devs.push(sd);
        degenerate.push(sd <= 1e-12 * mean.abs().max(1.0));
    }
    let stats = ScalingStats {
        means,
        std_devs,
        degenerate,
    };
    let scaled = stats.apply(a.view()).expect("width matches");
    let mut out = FeatureMatrix::new(scaled).expect("finite input stays finite");
    if let Some(names) = x.column_names() {
        out = out.with_column_names(names.to_vec()).expect("same width");
    }
    (out, stats)
}
