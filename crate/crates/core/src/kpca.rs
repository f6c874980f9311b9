//! Kernel PCA, exact and Nyström-approximated, with out-of-sample scoring.
//!
//! Exact fits eigendecompose the double-centered `n x n` Gram matrix
//! `K' = K - 1K/n - K1/n + 1K1/n^2`. Training scores are `sqrt(lambda_j)
//! alpha_j`, i.e. projections onto unit-norm principal axes in feature space,
//! and a new point `x` scores `k~(x) . alpha_j / sqrt(lambda_j)` where `k~(x)`
//! is its kernel row against the training set centered with the *training*
//! column means and grand mean.
//!
//! Nyström fits never form the `n x n` Gram matrix. With landmarks `L`,
//! `W = K(L, L)` and `C = K(X, L)`, each point is mapped to
//! `phi(x) = W^{-1/2} k_L(x)`, so that `phi(x_i) . phi(x_j)` reproduces the
//! Nyström approximation `C W^{-1} C^T`. Feature-space centering then reduces
//! to subtracting the training mean of `phi`, which equals `W^{-1/2} c_bar`
//! with `c_bar` the column means of `C`. PCA on the centered `n x c` feature
//! matrix (a `c x c` eigenproblem) gives axes `V`, and a point scores
//! `(k_L(x) - c_bar) . W^{-1/2} V`. Total cost is O(n c^2).

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::numerics::{kmeans, standardize, sym_eigen, sq_dists_between, ScalingStats};
use crate::{Error, FeatureMatrix, Result};

/// Schema tag of persisted models.
pub const MODEL_SCHEMA: &str = "kpca-model/v1";

/// Components with eigenvalue at or below this fraction of the largest are
/// dropped.
pub const EIGEN_DROP_RATIO: f64 = 1e-10;

/// The median heuristic looks at no more than this many (evenly strided)
/// rows, keeping bandwidth selection O(1) in memory for large fits.
pub const MEDIAN_SAMPLE: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    /// `exp(-gamma |a - b|^2)`
    Rbf { gamma: f64 },
    /// `<a, b>`
    Linear,
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { gamma } if !(gamma.is_finite() && gamma > 0.0) => Err(
                Error::InvalidInput(format!("rbf gamma must be positive, got {gamma}")),
            ),
            _ => Ok(()),
        }
    }
}

/// How the kernel is chosen at fit time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum KernelChoice {
    /// RBF with the median-heuristic bandwidth of the (standardized) data.
    #[default]
    RbfMedian,
    Rbf(f64),
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KpcaConfig {
    pub components: usize,
    pub kernel: KernelChoice,
    /// Standardize features before kerneling.
    pub standardize: bool,
}

impl Default for KpcaConfig {
    fn default() -> Self {
        Self {
            components: 2,
            kernel: KernelChoice::RbfMedian,
            standardize: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KpcaMode {
    Exact,
    Nystrom,
}

/// Train-time kernel statistics used to center new kernel rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Centering {
    /// Mean of each reference column of the training kernel (`K` for exact
    /// fits, `C` for Nyström fits).
    pub column_means: Vec<f64>,
    /// Mean of `column_means`.
    pub grand_mean: f64,
}

/// A fitted model: everything needed to score new rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpcaModel {
    pub schema: String,
    pub kernel: KernelSpec,
    pub mode: KpcaMode,
    /// Training rows (exact) or landmarks (Nyström), in standardized space.
    #[serde(with = "crate::dense")]
    pub reference_points: Array2<f64>,
    pub centering: Centering,
    /// `m x k`: centered kernel row times this gives the scores.
    #[serde(with = "crate::dense")]
    pub components: Array2<f64>,
    pub eigenvalues: Vec<f64>,
    pub feature_stats: Option<ScalingStats>,
    pub feature_names: Option<Vec<String>>,
    /// Ridge added to the landmark Gram matrix (Nyström only).
    pub ridge: f64,
    /// Requested components that were dropped for non-positive eigenvalues.
    pub dropped_components: usize,
}

/// Result of a fit: the model, the training scores and the size of the
/// largest matrix the fit allocated.
#[derive(Debug, Clone)]
pub struct KpcaFit {
    pub model: KpcaModel,
    pub scores: Array2<f64>,
    pub largest_matrix_elems: usize,
}

/// Kernel evaluations between the rows of `a` and the rows of `b`.
pub fn kernel_matrix(a: ArrayView2<f64>, b: ArrayView2<f64>, spec: &KernelSpec) -> Result<Array2<f64>> {
    if a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            actual: b.ncols(),
        });
    }
    match *spec {
        KernelSpec::Rbf { gamma } => {
            let mut k = sq_dists_between(a, b)?;
            k.mapv_inplace(|d| (-gamma * d).exp());
            Ok(k)
        }
        KernelSpec::Linear => Ok(a.dot(&b.t())),
    }
}

fn kernel_row(z: &[f64], reference: ArrayView2<f64>, spec: &KernelSpec, out: &mut [f64]) {
    for (o, r) in out.iter_mut().zip(reference.rows()) {
        *o = match *spec {
            KernelSpec::Rbf { gamma } => {
                let d: f64 = z.iter().zip(r.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * d).exp()
            }
            KernelSpec::Linear => z.iter().zip(r.iter()).map(|(a, b)| a * b).sum(),
        };
    }
}

/// `1 / (2 median(d^2))` over all nonzero squared pairwise distances.
pub fn median_gamma(x: &FeatureMatrix) -> Result<f64> {
    let n = x.n_rows();
    if n < 2 {
        return Err(Error::InvalidInput(
            "median bandwidth needs at least 2 observations".into(),
        ));
    }
    let a = x.as_array();
    let mut d2 = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let v: f64 = a
                .row(i)
                .iter()
                .zip(a.row(j).iter())
                .map(|(p, q)| (p - q) * (p - q))
                .sum();
            if v > 0.0 {
                d2.push(v);
            }
        }
    }
    if d2.is_empty() {
        return Err(Error::Degenerate(
            "all pairwise distances are zero; no bandwidth can be chosen".into(),
        ));
    }
    d2.sort_by(f64::total_cmp);
    let m = d2.len();
    let median = if m % 2 == 1 {
        d2[m / 2]
    } else {
        0.5 * (d2[m / 2 - 1] + d2[m / 2])
    };
    Ok(1.0 / (2.0 * median))
}

fn resolve_kernel(choice: KernelChoice, z: &FeatureMatrix) -> Result<KernelSpec> {
    let spec = match choice {
        KernelChoice::Linear => KernelSpec::Linear,
        KernelChoice::Rbf(gamma) => KernelSpec::Rbf { gamma },
        KernelChoice::RbfMedian => {
            let n = z.n_rows();
            let gamma = if n > MEDIAN_SAMPLE {
                let idx: Vec<usize> = (0..MEDIAN_SAMPLE).map(|i| i * n / MEDIAN_SAMPLE).collect();
                median_gamma(&z.select_rows(&idx)?)?
            } else {
                median_gamma(z)?
            };
            KernelSpec::Rbf { gamma }
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn prepare(x: &FeatureMatrix, cfg: &KpcaConfig) -> Result<(FeatureMatrix, Option<ScalingStats>)> {
    if cfg.components == 0 {
        return Err(Error::InvalidInput("component count must be >= 1".into()));
    }
    if cfg.standardize {
        let (z, stats) = standardize(x);
        Ok((z, Some(stats)))
    } else {
        Ok((x.clone(), None))
    }
}

/// Indices of eigenvalues worth keeping, and how many were dropped.
fn keep_positive(values: &[f64]) -> Result<(usize, usize)> {
    let top = values.first().copied().unwrap_or(0.0);
    if !(top > 0.0) {
        return Err(Error::Degenerate(
            "centered kernel matrix has no positive eigenvalue".into(),
        ));
    }
    let kept = values
        .iter()
        .take_while(|&&v| v > EIGEN_DROP_RATIO * top)
        .count();
    let dropped = values.len() - kept;
    if dropped > 0 {
        log::warn!("kernel PCA: dropped {dropped} component(s) with non-positive eigenvalues");
    }
    Ok((kept, dropped))
}

/// Flip each score column so its largest-magnitude entry is positive,
/// flipping the matching component column with it.
fn orient(scores: &mut Array2<f64>, components: &mut Array2<f64>) {
    for j in 0..scores.ncols() {
        let mut best = 0.0_f64;
        let mut sign = 1.0;
        for &v in scores.column(j).iter() {
            if v.abs() > best {
                best = v.abs();
                sign = v.signum();
            }
        }
        if sign < 0.0 {
            scores.column_mut(j).mapv_inplace(|v| -v);
            components.column_mut(j).mapv_inplace(|v| -v);
        }
    }
}

/// Exact kernel PCA on all `n` training rows (O(n^3)).
pub fn kpca_fit_exact(x: &FeatureMatrix, cfg: &KpcaConfig) -> Result<KpcaFit> {
    let n = x.n_rows();
    if cfg.components > n {
        return Err(Error::InvalidInput(format!(
            "cannot extract {} components from {n} observations",
            cfg.components
        )));
    }
    let (z, stats) = prepare(x, cfg)?;
    let kernel = resolve_kernel(cfg.kernel, &z)?;
    let mut k = kernel_matrix(z.view(), z.view(), &kernel)?;
    let col_means: Vec<f64> = k.mean_axis(Axis(0)).expect("n >= 1").to_vec();
    let grand = col_means.iter().sum::<f64>() / n as f64;
    for ((i, j), v) in k.indexed_iter_mut() {
        *v += grand - col_means[i] - col_means[j];
    }
    let eig = sym_eigen(k.view(), cfg.components)?;
    let (kept, dropped) = keep_positive(&eig.values)?;

    let mut components = Array2::zeros((n, kept));
    let mut scores = Array2::zeros((n, kept));
    for j in 0..kept {
        let root = eig.values[j].sqrt();
        let alpha = eig.vectors.column(j);
        components.column_mut(j).assign(&(&alpha / root));
        scores.column_mut(j).assign(&(&alpha * root));
    }
    orient(&mut scores, &mut components);
    let model = KpcaModel {
        schema: MODEL_SCHEMA.to_string(),
        kernel,
        mode: KpcaMode::Exact,
        reference_points: z.into_array(),
        centering: Centering {
            column_means: col_means,
            grand_mean: grand,
        },
        components,
        eigenvalues: eig.values[..kept].to_vec(),
        feature_stats: stats,
        feature_names: x.column_names().map(<[String]>::to_vec),
        ridge: 0.0,
        dropped_components: dropped,
    };
    Ok(KpcaFit {
        model,
        scores,
        largest_matrix_elems: n * n,
    })
}

/// Nyström kernel PCA with `c` k-means landmarks (O(n c^2)).
pub fn kpca_fit_nystrom(x: &FeatureMatrix, c: usize, cfg: &KpcaConfig, seed: u64) -> Result<KpcaFit> {
    let n = x.n_rows();
    if c > n {
        return Err(Error::InvalidInput(format!(
            "landmark count {c} exceeds the number of observations {n}"
        )));
    }
    if cfg.components > c {
        return Err(Error::InvalidInput(format!(
            "component count {} exceeds the landmark count {c}",
            cfg.components
        )));
    }
    let (z, stats) = prepare(x, cfg)?;
    let landmarks = kmeans(&z, c, seed)?.centroids;
    nystrom_core(x, z, stats, landmarks, cfg)
}

/// Nyström kernel PCA with caller-chosen landmarks, given in the raw
/// (unstandardized) feature space.
pub fn kpca_fit_nystrom_with_landmarks(
    x: &FeatureMatrix,
    landmarks: &FeatureMatrix,
    cfg: &KpcaConfig,
) -> Result<KpcaFit> {
    if landmarks.n_cols() != x.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: x.n_cols(),
            actual: landmarks.n_cols(),
        });
    }
    if cfg.components > landmarks.n_rows() {
        return Err(Error::InvalidInput(format!(
            "component count {} exceeds the landmark count {}",
            cfg.components,
            landmarks.n_rows()
        )));
    }
    let (z, stats) = prepare(x, cfg)?;
    let l = match &stats {
        Some(s) => s.apply(landmarks.view())?,
        None => landmarks.as_array().clone(),
    };
    nystrom_core(x, z, stats, l, cfg)
}

fn nystrom_core(
    x: &FeatureMatrix,
    z: FeatureMatrix,
    stats: Option<ScalingStats>,
    landmarks: Array2<f64>,
    cfg: &KpcaConfig,
) -> Result<KpcaFit> {
    let n = z.n_rows();
    let c = landmarks.nrows();
    let kernel = resolve_kernel(cfg.kernel, &z)?;
    let w = kernel_matrix(landmarks.view(), landmarks.view(), &kernel)?;
    let cross = kernel_matrix(z.view(), landmarks.view(), &kernel)?;

    // W^{-1/2}, with a small ridge when W is numerically singular.
    let w_eig = sym_eigen(w.view(), c)?;
    let trace: f64 = w.diag().sum();
    let tol = 1e-10 * trace.abs() / c as f64;
    let min_eig = w_eig.values.last().copied().unwrap_or(0.0);
    let ridge = if min_eig <= tol { tol.max(f64::MIN_POSITIVE) } else { 0.0 };
    let mut scaled_u = w_eig.vectors.clone();
    for (j, mut col) in scaled_u.columns_mut().into_iter().enumerate() {
        let lambda = w_eig.values[j].max(0.0) + ridge;
        if lambda > 0.0 {
            col /= lambda.sqrt();
        } else {
            col.fill(0.0);
        }
    }
    let w_inv_sqrt = scaled_u.dot(&w_eig.vectors.t());

    let col_means: Vec<f64> = cross.mean_axis(Axis(0)).expect("n >= 1").to_vec();
    let grand = col_means.iter().sum::<f64>() / c as f64;
    let mut centered = cross;
    for mut row in centered.rows_mut() {
        for (v, m) in row.iter_mut().zip(&col_means) {
            *v -= m;
        }
    }
    let phi = centered.dot(&w_inv_sqrt);
    let cov = phi.t().dot(&phi);
    let cov = (&cov + &cov.t()) * 0.5;
    let eig = sym_eigen(cov.view(), cfg.components)?;
    let (kept, dropped) = keep_positive(&eig.values)?;
    let axes = eig.vectors.slice(ndarray::s![.., ..kept]).to_owned();
    let mut scores = phi.dot(&axes);
    let mut components = w_inv_sqrt.dot(&axes);
    orient(&mut scores, &mut components);

    let model = KpcaModel {
        schema: MODEL_SCHEMA.to_string(),
        kernel,
        mode: KpcaMode::Nystrom,
        reference_points: landmarks,
        centering: Centering {
            column_means: col_means,
            grand_mean: grand,
        },
        components,
        eigenvalues: eig.values[..kept].to_vec(),
        feature_stats: stats,
        feature_names: x.column_names().map(<[String]>::to_vec),
        ridge,
        dropped_components: dropped,
    };
    Ok(KpcaFit {
        model,
        scores,
        largest_matrix_elems: (n * c).max(c * c),
    })
}

impl KpcaModel {
    pub fn n_features(&self) -> usize {
        self.reference_points.ncols()
    }

    pub fn n_components(&self) -> usize {
        self.components.ncols()
    }

    /// Score one raw observation.
    ///
    /// Each row is scored independently of any other, so batch and
    /// row-at-a-time scoring give bit-identical results.
    pub fn project_row(&self, raw: &[f64]) -> Result<Vec<f64>> {
        if raw.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                actual: raw.len(),
            });
        }
        let mut z = raw.to_vec();
        if let Some(stats) = &self.feature_stats {
            stats.apply_row(&mut z)?;
        }
        let m = self.reference_points.nrows();
        let mut k = vec![0.0; m];
        kernel_row(&z, self.reference_points.view(), &self.kernel, &mut k);
        match self.mode {
            KpcaMode::Exact => {
                let row_mean = k.iter().sum::<f64>() / m as f64;
                let shift = self.centering.grand_mean - row_mean;
                for (v, cm) in k.iter_mut().zip(&self.centering.column_means) {
                    *v += shift - cm;
                }
            }
            KpcaMode::Nystrom => {
                for (v, cm) in k.iter_mut().zip(&self.centering.column_means) {
                    *v -= cm;
                }
            }
        }
        Ok(self
            .components
            .columns()
            .into_iter()
            .map(|col| k.iter().zip(col.iter()).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Score a batch of raw observations (`n_new x d`).
    pub fn project(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                actual: x.ncols(),
            });
        }
        let mut out = Array2::zeros((x.nrows(), self.n_components()));
        for (mut dst, row) in out.rows_mut().into_iter().zip(x.rows()) {
            let s = self.project_row(&row.to_vec())?;
            dst.assign(&ndarray::ArrayView1::from(&s[..]));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = value
            .get("schema")
            .and_then(|s| s.as_str())
            .unwrap_or_default()
            .to_string();
        if found != MODEL_SCHEMA {
            return Err(Error::Schema {
                expected: MODEL_SCHEMA.into(),
                found,
            });
        }
        let model: KpcaModel = serde_json::from_value(value)?;
        model.check()?;
        Ok(model)
    }

    fn check(&self) -> Result<()> {
        self.kernel.validate()?;
        let m = self.reference_points.nrows();
        let bad = |what: &str| Err(Error::InvalidInput(format!("inconsistent model: {what}")));
        if self.components.nrows() != m || self.centering.column_means.len() != m {
            return bad("reference point count");
        }
        if self.eigenvalues.len() != self.n_components() {
            return bad("eigenvalue count");
        }
        if let Some(s) = &self.feature_stats {
            if s.n_features() != self.n_features() {
                return bad("feature statistics width");
            }
        }
        if let Some(names) = &self.feature_names {
            if names.len() != self.n_features() {
                return bad("feature name count");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{blobs, gaussian_matrix, BlobSpec};
    use ndarray::array;

    #[test]
    fn kernel_entries() {
        let a = gaussian_matrix(5, 3, 1).into_array();
        let b = gaussian_matrix(5, 3, 2).into_array();
        let spec = KernelSpec::Rbf { gamma: 0.7 };
        let k = kernel_matrix(a.view(), b.view(), &spec).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let d: f64 = (0..3).map(|t| (a[[i, t]] - b[[j, t]]).powi(2)).sum();
                assert!((k[[i, j]] - (-0.7 * d).exp()).abs() <= 1e-12);
            }
        }
        let same = kernel_matrix(a.view(), a.view(), &spec).unwrap();
        assert!(same.diag().iter().all(|&v| v == 1.0));
        assert_eq!(same, same.t());

        let e = Array2::<f64>::eye(3);
        let lin = kernel_matrix(e.view(), e.view(), &KernelSpec::Linear).unwrap();
        assert_eq!(lin, e);

        let narrow = array![[1.0, 2.0]];
        assert!(kernel_matrix(a.view(), narrow.view(), &spec).is_err());
    }

    #[test]
    fn median_bandwidth() {
        let x = FeatureMatrix::from_rows(&[[0.0, 0.0], [1.0, 0.0]]).unwrap();
        assert_eq!(median_gamma(&x).unwrap(), 0.5);

        let base = gaussian_matrix(30, 3, 5);
        let g = median_gamma(&base).unwrap();
        let rows: Vec<Vec<f64>> = base
            .as_array()
            .rows()
            .into_iter()
            .chain(base.as_array().rows())
            .map(|r| r.to_vec())
            .collect();
        let doubled = FeatureMatrix::from_rows(&rows).unwrap();
        assert_eq!(median_gamma(&doubled).unwrap(), g);

        let a = base.as_array();
        let mut d = Vec::new();
        for i in 0..30 {
            for j in 0..i {
                d.push((&a.row(i) - &a.row(j)).mapv(|v| v * v).sum());
            }
        }
        d.sort_by(f64::total_cmp);
        // 435 pairs: odd count, the median is the middle element.
        assert_eq!(g, 1.0 / (2.0 * d[217]));

        let same = FeatureMatrix::from_rows(&[[1.0], [1.0]]).unwrap();
        assert!(median_gamma(&same).is_err());
        let one = FeatureMatrix::from_rows(&[[1.0]]).unwrap();
        assert!(median_gamma(&one).is_err());
    }

    #[test]
    fn centered_gram_rows_vanish() {
        let x = gaussian_matrix(40, 3, 3);
        let fit = kpca_fit_exact(&x, &KpcaConfig::default()).unwrap();
        let m = &fit.model;
        let k = kernel_matrix(
            m.reference_points.view(),
            m.reference_points.view(),
            &m.kernel,
        )
        .unwrap();
        for i in 0..40 {
            let mut s = 0.0;
            for j in 0..40 {
                s += k[[i, j]] - m.centering.column_means[i] - m.centering.column_means[j]
                    + m.centering.grand_mean;
            }
            assert!(s.abs() <= 1e-8);
        }
    }

    #[test]
    fn projection_reproduces_training_scores() {
        let (x, _) = blobs(&BlobSpec::rpm_like(20, 5), 2);
        for fit in [
            kpca_fit_exact(&x, &KpcaConfig::default()).unwrap(),
            kpca_fit_nystrom(&x, 15, &KpcaConfig::default(), 4).unwrap(),
        ] {
            let again = fit.model.project(x.view()).unwrap();
            for (a, b) in again.iter().zip(fit.scores.iter()) {
                assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
            }
            let single = fit.model.project_row(&x.row(7).to_vec()).unwrap();
            assert_eq!(single, again.row(7).to_vec());
        }
    }

    #[test]
    fn far_point_scores_the_centering_offset() {
        let x = gaussian_matrix(25, 2, 6);
        let fit = kpca_fit_exact(&x, &KpcaConfig::default()).unwrap();
        let m = &fit.model;
        let s = m.project_row(&[1e3, -1e3]).unwrap();
        // Kernel row is ~0, so the centered row is grand_mean - column_means.
        for (j, &sj) in s.iter().enumerate() {
            let direct: f64 = (0..25)
                .map(|i| (m.centering.grand_mean - m.centering.column_means[i]) * m.components[[i, j]])
                .sum();
            assert!((sj - direct).abs() <= 1e-12);
        }
    }

    #[test]
    fn tiny_nystrom() {
        let x = gaussian_matrix(10, 3, 8);
        let cfg = KpcaConfig {
            components: 1,
            ..KpcaConfig::default()
        };
        let fit = kpca_fit_nystrom(&x, 1, &cfg, 0);
        // A single landmark carries no variance after centering unless the
        // kernel row varies; either a finite score column or a clean error.
        match fit {
            Ok(f) => {
                assert_eq!(f.scores.ncols(), 1);
                assert!(f.scores.iter().all(|v| v.is_finite()));
            }
            Err(e) => assert!(matches!(e, Error::Degenerate(_))),
        }
        assert!(kpca_fit_nystrom(&x, 11, &cfg, 0).is_err());
        let cfg3 = KpcaConfig {
            components: 3,
            ..KpcaConfig::default()
        };
        assert!(kpca_fit_nystrom(&x, 2, &cfg3, 0).is_err());
    }

    #[test]
    fn linear_kernel_matches_pca() {
        let x = gaussian_matrix(30, 4, 12);
        let cfg = KpcaConfig {
            components: 3,
            kernel: KernelChoice::Linear,
            standardize: false,
        };
        let fit = kpca_fit_exact(&x, &cfg).unwrap();
        let a = x.as_array();
        let mean = a.mean_axis(Axis(0)).unwrap();
        let xc = a - &mean;
        let cov = xc.t().dot(&xc);
        let eig = sym_eigen(cov.view(), 3).unwrap();
        let pca = xc.dot(&eig.vectors);
        for j in 0..3 {
            let s = if pca.column(j).dot(&fit.scores.column(j)) < 0.0 { -1.0 } else { 1.0 };
            for i in 0..30 {
                assert!((pca[[i, j]] * s - fit.scores[[i, j]]).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn json_round_trip_and_schema_check() {
        let x = gaussian_matrix(12, 3, 2)
            .with_column_names(vec!["a".into(), "b".into(), "c".into()])
            .unwrap();
        let fit = kpca_fit_exact(&x, &KpcaConfig::default()).unwrap();
        let text = fit.model.to_json().unwrap();
        assert!(text.contains("\"schema\": \"kpca-model/v1\""));
        let back = KpcaModel::from_json(&text).unwrap();
        assert_eq!(back, fit.model);
        let wrong = text.replace("kpca-model/v1", "kpca-model/v0");
        assert!(matches!(KpcaModel::from_json(&wrong), Err(Error::Schema { .. })));
        assert!(fit.model.project_row(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn bad_configs() {
        let x = gaussian_matrix(5, 2, 0);
        let too_many = KpcaConfig {
            components: 6,
            ..KpcaConfig::default()
        };
        assert!(kpca_fit_exact(&x, &too_many).is_err());
        let zero = KpcaConfig {
            components: 0,
            ..KpcaConfig::default()
        };
        assert!(kpca_fit_exact(&x, &zero).is_err());
        let neg = KpcaConfig {
            kernel: KernelChoice::Rbf(-1.0),
            ..KpcaConfig::default()
        };
        assert!(kpca_fit_exact(&x, &neg).is_err());
    }
}
