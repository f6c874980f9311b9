//! Dense-matrix primitives shared by the embedding, spectral and detection
//! code: the [`FeatureMatrix`] container, pairwise distances, a symmetric
//! eigensolver, k-means and column standardization.

mod distance;
mod eigen;
mod kmeans;
mod matrix;
mod scaling;

pub use distance::{pairwise_sq_dists, sq_dists_between};
pub use eigen::{sym_eigen, EigenResult};
pub use kmeans::{kmeans, kmeans_with_budget, KMeansResult, KMEANS_MAX_ITER};
pub use matrix::FeatureMatrix;
pub use scaling::{standardize, ScalingStats};
