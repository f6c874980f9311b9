use ndarray::{Array2, ArrayView2};

use super::FeatureMatrix;
use crate::{Error, Result};

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Squared Euclidean distances between all pairs of rows.
///
/// Computed from coordinate differences rather than the norm expansion, so
/// the diagonal is exactly zero, the result is exactly symmetric and no entry
/// is negative.
pub fn pairwise_sq_dists(x: &FeatureMatrix) -> Array2<f64> {
    let data = x.as_array().as_standard_layout();
    let d = x.n_cols();
    let flat = data.as_slice().expect("standard layout");
    let n = x.n_rows();
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        let xi = &flat[i * d..(i + 1) * d];
        for j in (i + 1)..n {
            let v = sq_dist(xi, &flat[j * d..(j + 1) * d]);
            out[[i, j]] = v;
            out[[j, i]] = v;
        }
    }
    out
}

/// Squared Euclidean distances between the rows of `a` and the rows of `b`.
pub fn sq_dists_between(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Result<Array2<f64>> {
    if a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            actual: b.ncols(),
        });
    }
    let a = a.as_standard_layout();
    let b = b.as_standard_layout();
    let d = a.ncols();
    let (fa, fb) = (a.as_slice().unwrap(), b.as_slice().unwrap());
    let mut out = Array2::zeros((a.nrows(), b.nrows()));
    for (i, mut row) in out.rows_mut().into_iter().enumerate() {
        let ai = &fa[i * d..(i + 1) * d];
        for (j, o) in row.iter_mut().enumerate() {
            *o = sq_dist(ai, &fb[j * d..(j + 1) * d]);
        }
    }
    Ok(out)
}
